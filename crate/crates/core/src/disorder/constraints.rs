//! Small-divisor constraint sets and the acceptable-set membership test.

use rustc_hash::FxHashSet;
use serde::Serialize;

use super::potential::DisorderRealization;
use super::DisorderError;
use crate::algebra::{MultiIndex, SiteExponent};
use crate::normal_form::NormalFormSchedule;

pub const DEFAULT_ENUMERATION_CAP: usize = 10_000_000;

/// Which multi-indices of a step enter the constraint set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ConstraintLimits {
    /// Largest admitted `|n|`.
    pub max_degree: u32,
    /// Largest admitted `Δ(n)`; `None` uses the step's diameter bound (strict).
    pub max_diameter: Option<u32>,
}

impl ConstraintLimits {
    /// `|n| ≤ 20A` and `Δ(n)` below the schedule's diameter bound.
    pub fn full(order: f64) -> Self {
        Self {
            max_degree: (20.0 * order).floor() as u32,
            max_diameter: None,
        }
    }

    /// The non-resonant terms of the initial Hamiltonian: nearest-neighbour
    /// quadratics.
    pub fn screen() -> Self {
        Self {
            max_degree: 2,
            max_diameter: Some(1),
        }
    }

    fn diameter_for(&self, schedule: &NormalFormSchedule, s: u32) -> u32 {
        match self.max_diameter {
            Some(d) => d,
            None => {
                let bound = schedule.step(s).diameter_bound;
                // strict inequality Δ < bound
                (bound.ceil() as i64 - 1).max(0) as u32
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepConstraints {
    pub s: u32,
    /// Divisor threshold `|Ω| > threshold` this step demands.
    pub threshold: f64,
    pub max_degree: u32,
    pub max_diameter: u32,
    /// One representative of each conjugate pair, sorted.
    pub indices: Vec<MultiIndex>,
}

impl StepConstraints {
    pub fn cardinality(&self) -> usize {
        self.indices.len()
    }

    /// Distinct linear forms `n - n'` (indices differing by resonant factors
    /// share a divisor).
    pub fn forms(&self) -> Vec<LinearForm> {
        let mut seen: FxHashSet<LinearForm> = FxHashSet::default();
        for n in &self.indices {
            let f = LinearForm::of(n);
            let neg = f.negated();
            if !seen.contains(&neg) {
                seen.insert(f);
            }
        }
        let mut out: Vec<LinearForm> = seen.into_iter().collect();
        out.sort();
        out
    }
}

/// `Ω(n) = Σ c_j ṽ_j` as a sparse list of `(site, c_j)` with `c_j ≠ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinearForm(pub Vec<(i32, i32)>);

impl LinearForm {
    pub fn of(n: &MultiIndex) -> Self {
        Self(
            n.entries()
                .iter()
                .filter(|e| e.n != e.nc)
                .map(|e| (e.site, e.n as i32 - e.nc as i32))
                .collect(),
        )
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&(j, c)| (j, -c)).collect())
    }

    pub fn eval(&self, v: impl Fn(i32) -> f64) -> f64 {
        self.0.iter().map(|&(j, c)| c as f64 * v(j)).sum()
    }

    /// Coefficient at the largest site, `n_{j+} - n'_{j+}`.
    pub fn leading(&self) -> i32 {
        self.0.last().map_or(0, |&(_, c)| c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintIndexSet {
    pub steps: Vec<StepConstraints>,
}

impl ConstraintIndexSet {
    pub fn cardinality(&self) -> usize {
        self.steps.iter().map(StepConstraints::cardinality).sum()
    }
}

/// All `(n_j, n'_j)` exponent vectors on `sites` with `Σn = Σn' ≤ half`,
/// the first site used, non-resonant, conjugate representative.
fn enumerate_window(
    sites: &[i32],
    half_degree: u32,
    cap: usize,
    out: &mut Vec<MultiIndex>,
) -> Result<(), DisorderError> {
    let mut entries: Vec<SiteExponent> = Vec::with_capacity(sites.len());
    fn rec(
        sites: &[i32],
        k: usize,
        left_n: u32,
        left_nc: u32,
        half: u32,
        entries: &mut Vec<SiteExponent>,
        out: &mut Vec<MultiIndex>,
        cap: usize,
    ) -> Result<(), DisorderError> {
        if k == sites.len() {
            if left_n != left_nc || left_n == half {
                return Ok(());
            }
            let n = MultiIndex::from_sorted(entries.iter().copied());
            if !n.is_resonant() && n.is_pair_representative() {
                if out.len() >= cap {
                    return Err(DisorderError::EnumerationCap { count: out.len() + 1, cap });
                }
                out.push(n);
            }
            return Ok(());
        }
        for a in 0..=left_n {
            for b in 0..=left_nc {
                if k == 0 && a + b == 0 {
                    continue;
                }
                if a + b > 0 {
                    entries.push(SiteExponent::new(sites[k], a as u16, b as u16));
                }
                rec(sites, k + 1, left_n - a, left_nc - b, half, entries, out, cap)?;
                if a + b > 0 {
                    entries.pop();
                }
            }
        }
        Ok(())
    }
    // `left_*` counts the remaining budget; equal leftovers mean Σn = Σn'.
    rec(sites, 0, half_degree, half_degree, half_degree, &mut entries, out, cap)
}

/// Constraint indices of step `s`: support inside the step's bands, diameter
/// and degree within `limits`, non-resonant, gauge balanced, one of each
/// conjugate pair.
pub fn enumerate_constraint_indices(
    schedule: &NormalFormSchedule,
    s: u32,
    limits: ConstraintLimits,
    cap: usize,
) -> Result<StepConstraints, DisorderError> {
    if s == 0 || s > schedule.s_star {
        return Err(DisorderError::InvalidParameter(format!(
            "step {s} outside 1..={}",
            schedule.s_star
        )));
    }
    let st = schedule.step(s);
    let max_diameter = limits.diameter_for(schedule, s);
    let half = limits.max_degree / 2;
    let mut out = Vec::new();
    if st.a <= st.b && half > 0 {
        for (lo, hi) in [(-st.b, -st.a), (st.a, st.b)] {
            for m in lo..=hi {
                let last = (m + max_diameter as i64).min(hi);
                let sites: Vec<i32> = (m..=last).map(|j| j as i32).collect();
                enumerate_window(&sites, half, cap, &mut out)?;
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(StepConstraints {
        s,
        threshold: st.divisor_threshold,
        max_degree: limits.max_degree,
        max_diameter,
        indices: out,
    })
}

/// Steps `1..=s*`.
pub fn enumerate_all(
    schedule: &NormalFormSchedule,
    limits: ConstraintLimits,
    cap: usize,
) -> Result<ConstraintIndexSet, DisorderError> {
    let mut steps = Vec::new();
    let mut total = 0;
    for s in 1..=schedule.s_star {
        let c = enumerate_constraint_indices(schedule, s, limits, cap.saturating_sub(total))?;
        total += c.cardinality();
        steps.push(c);
    }
    Ok(ConstraintIndexSet { steps })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintViolation {
    pub s: u32,
    pub index: String,
    pub omega: f64,
    pub threshold: f64,
}

/// Every constraint `|Ω(n)| > threshold_s` against `ṽ`. Forms are checked
/// once per distinct `n - n'`; the violation names the smallest index with
/// that form.
pub fn acceptable_set_check(v: &DisorderRealization, set: &ConstraintIndexSet) -> Vec<ConstraintViolation> {
    let mut out = Vec::new();
    for step in &set.steps {
        let mut checked: FxHashSet<LinearForm> = FxHashSet::default();
        for n in &step.indices {
            let f = LinearForm::of(n);
            if checked.contains(&f) {
                continue;
            }
            let omega = f.eval(|j| v.tilde(j));
            checked.insert(f);
            if omega.abs() <= step.threshold {
                out.push(ConstraintViolation {
                    s: step.s,
                    index: n.to_string(),
                    omega,
                    threshold: step.threshold,
                });
            }
        }
    }
    out
}

/// Pre-digested forms for repeated checks (Monte Carlo, window scans).
#[derive(Clone, Debug)]
pub struct CompiledConstraints {
    pub steps: Vec<(u32, f64, Vec<LinearForm>)>,
}

impl CompiledConstraints {
    pub fn new(set: &ConstraintIndexSet) -> Self {
        Self {
            steps: set.steps.iter().map(|s| (s.s, s.threshold, s.forms())).collect(),
        }
    }

    /// First failing step, with the smallest `|Ω|` seen over all forms.
    pub fn check(&self, v: impl Fn(i32) -> f64) -> (Option<u32>, f64) {
        let mut first = None;
        let mut min = f64::INFINITY;
        for (s, threshold, forms) in &self.steps {
            for f in forms {
                let w = f.eval(&v).abs();
                min = min.min(w);
                if w <= *threshold && first.is_none() {
                    first = Some(*s);
                }
            }
        }
        (first, min)
    }

    pub fn passes(&self, v: impl Fn(i32) -> f64) -> bool {
        self.steps
            .iter()
            .all(|(_, t, forms)| forms.iter().all(|f| f.eval(&v).abs() > *t))
    }

    /// Smallest and largest site any form touches.
    pub fn site_range(&self) -> Option<(i32, i32)> {
        let sites = self.steps.iter().flat_map(|(_, _, f)| f.iter()).flat_map(|f| f.0.iter().map(|&(j, _)| j));
        sites.fold(None, |acc, j| match acc {
            None => Some((j, j)),
            Some((a, b)) => Some((a.min(j), b.max(j))),
        })
    }

    pub fn form_count(&self) -> usize {
        self.steps.iter().map(|(_, _, f)| f.len()).sum()
    }
}
