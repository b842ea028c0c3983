//! Certificates of accepted seeds: the normal-form report, the conjugacy
//! check against the numerical flow of the generators, and sensitivity.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Mode};
use super::report::RunReport;
use super::search::{examine_seeds, AcceptedSeed, SeedStatus};
use super::HarnessError;
use crate::algebra::{Hamiltonian, LatticeBox, Polynomial, State};
use crate::dynamics::composed_transform;
use crate::exec::par_map;
use crate::normal_form::{sensitivity_check, NormalFormReport, NormalFormResult, SensitivityInput, SensitivityReport};

/// RK4 steps per unit time of each generator flow.
pub const GENERATOR_FLOW_STEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyReport {
    pub states: usize,
    /// Largest `|H'(q) - H(Γ(q))|`.
    pub max_defect: f64,
    pub remainder_norm: f64,
    pub passes: bool,
}

/// Random state with `|q_j| ≤ sup` on every site of `lattice`.
pub fn random_bounded_state(lattice: LatticeBox, sup: f64, rng: &mut ChaCha8Rng) -> State {
    State::from_fn(lattice, |_| {
        let r: f64 = rng.random::<f64>() * sup;
        let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        Complex64::from_polar(r, phi)
    })
}

/// `|H'(q) - H(Γ(q))| ≤ remainder_norm` on `states` random states with
/// `‖q‖_∞ ≤ 1`, with `Γ` the composed generator flows.
pub fn conjugacy_check(initial: &Hamiltonian, result: &NormalFormResult, states: usize, seed: u64) -> ConjugacyReport {
    let gens: Vec<&Polynomial<Complex64>> = result.generators.iter().map(|g| &g.poly).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x636f_6e6a);
    let qs: Vec<State> = (0..states)
        .map(|_| random_bounded_state(initial.lattice(), 1.0, &mut rng))
        .collect();
    let defects = par_map(&qs, |q| {
        let moved = composed_transform(&gens, q, GENERATOR_FLOW_STEPS);
        let lhs = result.hamiltonian.evaluate(q).unwrap_or(f64::NAN);
        let rhs = initial.evaluate(&moved).unwrap_or(f64::NAN);
        (lhs - rhs).abs()
    });
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    let remainder_norm = result.remainder_norm();
    ConjugacyReport {
        states,
        max_defect,
        remainder_norm,
        passes: defects.iter().all(|d| d.is_finite()) && max_defect <= remainder_norm,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub seed: u64,
    pub j0: Option<i64>,
    #[serde(flatten)]
    pub status: SeedStatus,
    pub certified: Option<bool>,
    pub conjugacy: Option<ConjugacyReport>,
    pub sensitivity: Option<SensitivityReport>,
    pub pass: bool,
    #[serde(skip)]
    pub report: Option<NormalFormReport>,
}

fn verify_one(cfg: &ExperimentConfig, a: &AcceptedSeed, with_sensitivity: bool) -> VerifyOutcome {
    let report = NormalFormReport::from_result(&a.result, cfg.normal_form.max_listed);
    let conjugacy = (cfg.conjugacy_states > 0).then(|| conjugacy_check(&a.initial, &a.result, cfg.conjugacy_states, a.seed));
    let sensitivity = if with_sensitivity && cfg.eps_total() > 0.0 {
        let opts = cfg.normal_form.options();
        let input = SensitivityInput {
            v: &a.realization,
            eps1: cfg.eps1,
            eps2: cfg.eps2,
            order: cfg.order,
            j0: a.j0,
            n: cfg.n_resolved(),
            h: cfg.sensitivity_h,
            options: &opts,
        };
        sensitivity_check(&input).ok()
    } else {
        None
    };
    let sens_ok = !with_sensitivity || cfg.eps_total() == 0.0 || sensitivity.as_ref().is_some_and(|s| s.passes());
    let certified = a.result.certified();
    VerifyOutcome {
        seed: a.seed,
        j0: Some(a.j0),
        status: SeedStatus::Accepted,
        certified: Some(certified),
        pass: certified && sens_ok && conjugacy.as_ref().is_none_or(|c| c.passes),
        conjugacy,
        sensitivity,
        report: Some(report),
    }
}

/// `normal-form` reports the certificates of each accepted seed; `verify`
/// adds the sensitivity check.
pub fn run_verify_mode(cfg: &ExperimentConfig, mode: Mode) -> Result<RunReport<VerifyOutcome>, HarnessError> {
    let cfg = cfg.clone().resolve(mode)?;
    let seeds = cfg.seed_list()?;
    let (outcomes, accepted) = examine_seeds(&cfg, &seeds, &cfg.normal_form.options())?;
    let with_sensitivity = mode == Mode::Verify && cfg.sensitivity;
    let checked = accepted
        .iter()
        .map(|a| verify_one(&cfg, a, with_sensitivity))
        .collect::<Vec<_>>();
    let mut by_seed: BTreeMap<u64, VerifyOutcome> = checked.into_iter().map(|r| (r.seed, r)).collect();
    let all: Vec<VerifyOutcome> = outcomes
        .into_iter()
        .map(|o| {
            by_seed.remove(&o.seed).unwrap_or(VerifyOutcome {
                seed: o.seed,
                j0: o.j0,
                status: o.status,
                certified: None,
                conjugacy: None,
                sensitivity: None,
                pass: false,
                report: None,
            })
        })
        .collect();
    let ran: Vec<&VerifyOutcome> = all.iter().filter(|o| o.certified.is_some()).collect();
    let mut agg = BTreeMap::new();
    agg.insert("seeds".into(), all.len() as f64);
    agg.insert("accepted".into(), ran.len() as f64);
    agg.insert("certified".into(), ran.iter().filter(|o| o.certified == Some(true)).count() as f64);
    agg.insert("passed".into(), ran.iter().filter(|o| o.pass).count() as f64);
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for o in &ran {
        if let Some(r) = &o.report {
            for (k, c) in &r.violation_counts {
                *kinds.entry(k.clone()).or_default() += c;
            }
            let e = agg.entry("max_band_coeff".into()).or_insert(0.0f64);
            *e = e.max(r.barrier.max_band_coeff);
            let e = agg.entry("max_remainder_norm".into()).or_insert(0.0f64);
            *e = e.max(r.remainder_norm);
        }
    }
    for (k, c) in kinds {
        agg.insert(format!("violations_{k}"), c as f64);
    }
    // an explicit potential must itself be accepted
    let explicit_rejected = cfg.potential.is_some() && ran.is_empty();
    let pass = !explicit_rejected && ran.iter().all(|o| o.pass);
    Ok(RunReport {
        mode,
        config: cfg,
        outcomes: all,
        aggregate: agg,
        pass,
        aborted: false,
    })
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<RunReport<VerifyOutcome>, HarnessError> {
    run_verify_mode(cfg, Mode::Verify)
}

pub fn run_normal_form_mode(cfg: &ExperimentConfig) -> Result<RunReport<VerifyOutcome>, HarnessError> {
    run_verify_mode(cfg, Mode::NormalForm)
}
