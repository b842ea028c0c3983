//! Monte Carlo estimates of the acceptable-set measure, the single-form
//! small-divisor bound and the `j0` window scan.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::constraints::{enumerate_all, CompiledConstraints, ConstraintLimits, LinearForm};
use super::potential::{site_value, DisorderRealization};
use super::stats::Proportion;
use super::DisorderError;
use crate::algebra::MultiIndex;
use crate::exec::par_map_range;
use crate::normal_form::{build_schedule, NormalFormSchedule, ScheduleConstants};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleFormReport {
    pub index: String,
    pub delta: f64,
    pub trials: u64,
    pub hits: Proportion,
    /// `2δ / |n_{j+} - n'_{j+}|`.
    pub bound: f64,
    pub passes: bool,
}

/// `P(|Ω(n)| < δ)` for i.i.d. uniform `ṽ` on the support of `n`, against
/// the density bound `2δ / |c_{j+}|` plus three standard errors.
pub fn single_form_measure_test(
    n: &MultiIndex,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<SingleFormReport, DisorderError> {
    if n.is_resonant() {
        return Err(DisorderError::InvalidParameter(format!("{n} is resonant")));
    }
    let form = LinearForm::of(n);
    let lead = form.leading();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; form.0.len()];
    let mut hits = 0u64;
    for _ in 0..trials {
        for x in values.iter_mut() {
            *x = rng.random::<f64>();
        }
        let omega: f64 = form.0.iter().zip(&values).map(|(&(_, c), x)| c as f64 * x).sum();
        if omega.abs() < delta {
            hits += 1;
        }
    }
    let hits = Proportion::new(hits, trials);
    let bound = 2.0 * delta / lead.unsigned_abs() as f64;
    Ok(SingleFormReport {
        index: n.to_string(),
        delta,
        trials,
        passes: hits.estimate <= bound + 3.0 * hits.sigma,
        hits,
        bound,
    })
}

/// Parameters of an acceptable-set experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceptanceParams {
    pub eps: f64,
    pub order: f64,
    pub j0: i64,
    pub n: i64,
    pub constants: ScheduleConstants,
    pub limits: ConstraintLimits,
    pub cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub seed: u64,
    pub j0: i64,
    pub pass: bool,
    pub min_omega: f64,
    pub first_violation_step: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub params: AcceptanceParams,
    pub counts: Vec<usize>,
    pub form_counts: Vec<usize>,
    pub thresholds: Vec<f64>,
    pub acceptance: Proportion,
    /// `2 Σ_s count_s θ_s`, capped at 1.
    pub union_bound: f64,
    /// `Σ_forms 2θ_s / |c_{j+}|` over distinct forms, capped at 1.
    pub union_bound_forms: f64,
    /// `1 - P(S)^{1/sites}` over the band sites.
    pub per_site_failure: f64,
    pub failure_within_bound: bool,
    pub rows: Vec<TrialRow>,
}

pub fn acceptance_schedule(p: &AcceptanceParams) -> Result<NormalFormSchedule, DisorderError> {
    build_schedule(p.eps, p.order, p.j0, p.n, p.constants).map_err(|e| DisorderError::InvalidParameter(e.to_string()))
}

/// Empirical `P(S)` over `trials` potentials with seeds `seed0..seed0+trials`.
pub fn monte_carlo_acceptance(p: &AcceptanceParams, trials: u64, seed0: u64) -> Result<AcceptanceReport, DisorderError> {
    if trials == 0 {
        return Err(DisorderError::InvalidParameter("trials must be positive".into()));
    }
    let schedule = acceptance_schedule(p)?;
    let set = enumerate_all(&schedule, p.limits, p.cap)?;
    let compiled = CompiledConstraints::new(&set);
    let (lo, hi) = compiled.site_range().unwrap_or((0, 0));
    let rows: Vec<TrialRow> = par_map_range(seed0, seed0 + trials, |seed| {
        let values: Vec<f64> = (lo..=hi).map(|j| site_value(seed, j)).collect();
        let (first, min) = compiled.check(|j| values[(j - lo) as usize]);
        TrialRow {
            seed,
            j0: p.j0,
            pass: first.is_none(),
            min_omega: min,
            first_violation_step: first,
        }
    });
    let passes = rows.iter().filter(|r| r.pass).count() as u64;
    let acceptance = Proportion::new(passes, trials);
    let counts: Vec<usize> = set.steps.iter().map(|s| s.cardinality()).collect();
    let thresholds: Vec<f64> = set.steps.iter().map(|s| s.threshold).collect();
    let union_bound = (2.0 * counts.iter().zip(&thresholds).map(|(c, t)| *c as f64 * t).sum::<f64>()).min(1.0);
    let union_bound_forms = compiled
        .steps
        .iter()
        .flat_map(|(_, t, forms)| forms.iter().map(move |f| 2.0 * t / f.leading().unsigned_abs() as f64))
        .sum::<f64>()
        .min(1.0);
    let (a, b) = (schedule.step(1).a, schedule.step(1).b);
    let sites = if b >= a { 2 * (b - a + 1) } else { 0 } as f64;
    let per_site_failure = if sites > 0.0 {
        1.0 - acceptance.estimate.powf(1.0 / sites)
    } else {
        0.0
    };
    let failure = 1.0 - acceptance.estimate;
    Ok(AcceptanceReport {
        params: p.clone(),
        form_counts: compiled.steps.iter().map(|(_, _, f)| f.len()).collect(),
        counts,
        thresholds,
        failure_within_bound: failure <= union_bound + 3.0 * acceptance.sigma,
        acceptance,
        union_bound,
        union_bound_forms,
        per_site_failure,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub eps: Vec<f64>,
    pub acceptance: Vec<Proportion>,
    /// For consecutive pairs (larger ε, smaller ε): trials passing only at
    /// the smaller and only at the larger value.
    pub discordant: Vec<(u64, u64)>,
    /// `P(S)` at the smaller ε is not below the larger by more than 3σ of
    /// the paired difference.
    pub non_decreasing: bool,
}

/// The same seeds at each `ε` (sorted decreasing).
pub fn paired_monotonicity(
    base: &AcceptanceParams,
    eps: &[f64],
    trials: u64,
    seed0: u64,
) -> Result<MonotonicityReport, DisorderError> {
    let mut eps = eps.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut reports = Vec::new();
    for &e in &eps {
        reports.push(monte_carlo_acceptance(&AcceptanceParams { eps: e, ..base.clone() }, trials, seed0)?);
    }
    let mut discordant = Vec::new();
    let mut ok = true;
    for w in reports.windows(2) {
        let (big, small) = (&w[0], &w[1]);
        let only_small = big.rows.iter().zip(&small.rows).filter(|(x, y)| !x.pass && y.pass).count() as u64;
        let only_big = big.rows.iter().zip(&small.rows).filter(|(x, y)| x.pass && !y.pass).count() as u64;
        // paired difference of proportions: var ≈ (b + c)/n² (McNemar)
        let n = trials as f64;
        let diff = (only_small as f64 - only_big as f64) / n;
        let sigma = ((only_small + only_big) as f64).sqrt() / n;
        if diff < -3.0 * sigma.max(1.0 / n) {
            ok = false;
        }
        discordant.push((only_small, only_big));
    }
    Ok(MonotonicityReport {
        eps,
        acceptance: reports.iter().map(|r| r.acceptance).collect(),
        discordant,
        non_decreasing: ok,
    })
}

/// Candidate windows `j0 = j̄0, j̄0 + 2N, …, ≤ 2 j̄0`.
pub fn j0_candidates(jbar0: i64, n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut j0 = jbar0;
    while j0 <= 2 * jbar0 {
        out.push(j0);
        j0 += 2 * n;
    }
    out
}

/// Screen of one window against the step-1 constraints of `limits`, with the
/// unmodulated potential.
pub fn screen_window(
    v: &DisorderRealization,
    eps: f64,
    order: f64,
    j0: i64,
    n: i64,
    constants: ScheduleConstants,
    limits: ConstraintLimits,
) -> Result<bool, DisorderError> {
    let schedule = build_schedule(eps, order, j0, n, constants).map_err(|e| DisorderError::InvalidParameter(e.to_string()))?;
    let step = super::constraints::enumerate_constraint_indices(&schedule, 1, limits, super::DEFAULT_ENUMERATION_CAP)?;
    let threshold = step.threshold;
    let u = v.unmodulated();
    Ok(step.forms().iter().all(|f| f.eval(|j| u.tilde(j)).abs() > threshold))
}

/// First candidate window whose step-1 screen passes.
pub fn scan_j0(
    v: &DisorderRealization,
    jbar0: i64,
    n: i64,
    eps: f64,
    order: f64,
    constants: ScheduleConstants,
    limits: ConstraintLimits,
) -> Result<Option<i64>, DisorderError> {
    if jbar0 < 2 * n {
        return Err(DisorderError::InvalidParameter(format!("j̄0 = {jbar0} is below 2N = {}", 2 * n)));
    }
    for j0 in j0_candidates(jbar0, n) {
        if screen_window(v, eps, order, j0, n, constants, limits)? {
            return Ok(Some(j0));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_delta_never_hits() {
        let r = single_form_measure_test(&MultiIndex::pair(0, 1), 0.0, 1000, 1).unwrap();
        assert_eq!(r.hits.successes, 0);
        assert!(r.passes);
    }

    #[test]
    fn resonant_form_rejected() {
        assert!(single_form_measure_test(&MultiIndex::single(0, 1, 1), 0.1, 10, 1).is_err());
    }

    #[test]
    fn candidate_grid() {
        assert_eq!(j0_candidates(64, 32), vec![64, 128]);
        assert_eq!(j0_candidates(100, 10), vec![100, 120, 140, 160, 180, 200]);
    }
}
