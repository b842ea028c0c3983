//! Long-time runs of the lattice equation at accepted seeds, with the leak
//! constant `Ĉ` measured from the normal form.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::config::{CalibrationSettings, ExperimentConfig, Mode};
use super::report::RunReport;
use super::search::{examine_seeds, lattice, AcceptedSeed, SeedStatus};
use super::HarnessError;
use crate::algebra::{Hamiltonian, LatticeBox, State};
use crate::dynamics::{default_dt, integrate, mass_flux, DynamicsError, HoppingBasis, IntegratorConfig, ObserverSeries, SplitStepper};
use crate::exec::par_map;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakCalibration {
    /// Largest `|flux|` through `|j| = j0` under `H'` over the ensemble.
    pub leak_rate: f64,
    /// `leak_rate / ε^A`.
    pub c_hat: f64,
    pub states: usize,
    /// Half-width and side of the state that attained the maximum.
    pub worst_width: i64,
    pub worst_side: i8,
}

/// Unit-ℓ² complex Gaussian state supported on `[lo, hi]`.
pub fn gaussian_state(lattice: LatticeBox, lo: i32, hi: i32, rng: &mut ChaCha8Rng) -> State {
    let mut q = State::zeros(lattice);
    for j in lo..=hi {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        q.set(j, Complex64::new(re, im));
    }
    let n = q.norm();
    q.scale(1.0 / n);
    q
}

/// Max leak over random unit states on `[j0-k, j0+k+1]` and its mirror,
/// `k = 1..=max_width`, drawn from a stream fixed by `seed`.
pub fn calibrate_leak(
    h: &Hamiltonian,
    j0: i64,
    n: i64,
    eps: f64,
    order: f64,
    settings: &CalibrationSettings,
    seed: u64,
) -> LeakCalibration {
    let lattice = h.lattice();
    let top = settings.max_width.unwrap_or(n).min(j0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x6c65_616b);
    let mut best = (0.0f64, 0i64, 1i8);
    let mut states = 0;
    for k in 1..=top {
        for side in [1i8, -1] {
            let (a, b) = ((j0 - k) as i32, (j0 + k + 1) as i32);
            let (lo, hi) = if side > 0 { (a, b) } else { (-b, -a) };
            if !lattice.contains(lo) || !lattice.contains(hi) {
                continue;
            }
            for _ in 0..settings.states_per_width {
                let q = gaussian_state(lattice, lo, hi, &mut rng);
                let f = mass_flux(h, &q, j0).abs();
                states += 1;
                if f > best.0 {
                    best = (f, k, side);
                }
            }
        }
    }
    LeakCalibration {
        leak_rate: best.0,
        c_hat: best.0 / eps.powf(order),
        states,
        worst_width: best.1,
        worst_side: best.2,
    }
}

/// `sech(j / w)` normalized to unit ℓ².
pub fn sech_packet(lattice: LatticeBox, width: f64) -> State {
    let mut q = State::from_fn(lattice, |j| Complex64::new(1.0 / (j as f64 / width).cosh(), 0.0));
    let n = q.norm();
    q.scale(1.0 / n);
    q
}

pub fn initial_datum(cfg: &ExperimentConfig) -> Result<State, HarnessError> {
    let b = lattice(cfg)?;
    match &cfg.initial {
        Some(q) => State::from_vec(b, q.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .map_err(|e| HarnessError::Config(e.to_string())),
        None => Ok(sech_packet(b, cfg.packet_width)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutcome {
    pub seed: u64,
    pub j0: Option<i64>,
    #[serde(flatten)]
    pub status: SeedStatus,
    pub calibration: Option<LeakCalibration>,
    pub max_band_coeff: Option<f64>,
    pub remainder_norm: Option<f64>,
    /// `Σ_{|j| > j0 - N} |q_j(0)|²`, required below δ.
    pub initial_tail: Option<f64>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<u64>,
    pub max_m_j0n: Option<f64>,
    pub norm_drift: Option<f64>,
    pub energy_drift: Option<f64>,
    /// `M_{j0+N}(t) < 2δ` at every sample up to `T`.
    pub localized: Option<bool>,
    pub abort: Option<String>,
    #[serde(skip)]
    pub series: Option<ObserverSeries>,
}

impl SimulateOutcome {
    fn skipped(seed: u64, j0: Option<i64>, status: SeedStatus) -> Self {
        Self {
            seed,
            j0,
            status,
            calibration: None,
            max_band_coeff: None,
            remainder_norm: None,
            initial_tail: None,
            t_end: None,
            dt: None,
            steps: None,
            max_m_j0n: None,
            norm_drift: None,
            energy_drift: None,
            localized: None,
            abort: None,
            series: None,
        }
    }
}

fn simulate_one(
    cfg: &ExperimentConfig,
    a: &AcceptedSeed,
    cal: LeakCalibration,
    t_end: f64,
    q0: &State,
    basis: &HoppingBasis,
) -> SimulateOutcome {
    let n = cfg.n_resolved();
    let v = a.realization.values().to_vec();
    let dt = cfg.dt.unwrap_or_else(|| default_dt(&v, cfg.eps1, cfg.eps2, q0));
    let mut icfg = IntegratorConfig::new(dt, t_end, a.j0, n);
    icfg.samples = cfg.samples;
    icfg.edge_width = cfg.edge_width;
    icfg.edge_limit = cfg.edge_limit;
    let mut stepper = SplitStepper::with_basis(basis.clone(), v, cfg.eps1, cfg.eps2, icfg.effective_dt());
    let mut out = SimulateOutcome::skipped(a.seed, Some(a.j0), SeedStatus::Accepted);
    out.calibration = Some(cal);
    out.max_band_coeff = Some(a.result.max_band_coeff);
    out.remainder_norm = Some(a.result.remainder_norm());
    out.initial_tail = Some(q0.tail_mass((a.j0 - n) as i32));
    out.t_end = Some(t_end);
    out.dt = Some(icfg.effective_dt());
    out.steps = Some(icfg.steps());
    let series = match integrate(q0, &mut stepper, &icfg) {
        Ok(tr) => tr.series,
        Err(e) => {
            out.abort = Some(e.to_string());
            match e {
                DynamicsError::NonFinite { series, .. } | DynamicsError::EdgeMass { series, .. } => *series,
                _ => ObserverSeries::default(),
            }
        }
    };
    let max_m = series.max_m_j0n();
    out.max_m_j0n = Some(max_m);
    out.norm_drift = Some(series.max_relative_norm_drift());
    out.energy_drift = Some(series.max_energy_drift());
    out.localized = Some(out.abort.is_none() && max_m < 2.0 * cfg.delta);
    out.series = Some(series);
    out
}

/// Integration time `δ ε^{-A} / Ĉ` for a frozen `Ĉ`.
pub fn localization_time(delta: f64, eps: f64, order: f64, c_hat: f64) -> f64 {
    delta * eps.powf(-order) / c_hat
}

pub fn run_simulate(cfg: &ExperimentConfig) -> Result<RunReport<SimulateOutcome>, HarnessError> {
    let cfg = cfg.clone().resolve(Mode::Simulate)?;
    let seeds = cfg.seed_list()?;
    let (outcomes, accepted) = examine_seeds(&cfg, &seeds, &cfg.normal_form.options())?;
    let eps = cfg.eps_total();
    let n = cfg.n_resolved();
    let cals = par_map(&accepted, |a| {
        calibrate_leak(&a.result.hamiltonian, a.j0, n, eps, cfg.order, &cfg.calibration, a.seed)
    });
    // one Ĉ for the whole report
    let c_hat = cals.iter().map(|c| c.c_hat).fold(0.0, f64::max);
    let t_end = match cfg.t_end {
        Some(t) => t,
        None if c_hat > 0.0 => localization_time(cfg.delta, eps, cfg.order, c_hat),
        None => {
            return Err(HarnessError::Config(
                "no accepted seed gave a positive leak rate; set T explicitly".into(),
            ))
        }
    };
    let q0 = initial_datum(&cfg)?;
    let basis = HoppingBasis::new(q0.as_slice().len());
    let jobs: Vec<(usize, LeakCalibration)> = cals.iter().copied().enumerate().collect();
    let runs = par_map(&jobs, |&(k, cal)| simulate_one(&cfg, &accepted[k], cal, t_end, &q0, &basis));

    let mut by_seed: BTreeMap<u64, SimulateOutcome> = runs.into_iter().map(|r| (r.seed, r)).collect();
    let all: Vec<SimulateOutcome> = outcomes
        .into_iter()
        .map(|o| by_seed.remove(&o.seed).unwrap_or_else(|| SimulateOutcome::skipped(o.seed, o.j0, o.status)))
        .collect();

    let ran: Vec<&SimulateOutcome> = all.iter().filter(|o| o.localized.is_some()).collect();
    let successes = ran.iter().filter(|o| o.localized == Some(true)).count();
    let aborted = ran.iter().any(|o| o.abort.is_some());
    let frac = if ran.is_empty() { 0.0 } else { successes as f64 / ran.len() as f64 };
    let mut agg = BTreeMap::new();
    agg.insert("seeds".into(), all.len() as f64);
    agg.insert("accepted".into(), ran.len() as f64);
    agg.insert(
        "scan_failures".into(),
        all.iter().filter(|o| o.status == SeedStatus::ScanFailure).count() as f64,
    );
    agg.insert("localized".into(), successes as f64);
    agg.insert("success_fraction".into(), frac);
    agg.insert("c_hat".into(), c_hat);
    agg.insert("t_end".into(), t_end);
    let leaks: Vec<f64> = cals.iter().map(|c| c.leak_rate).collect();
    if !leaks.is_empty() {
        agg.insert("max_leak_rate".into(), leaks.iter().copied().fold(0.0, f64::max));
        agg.insert(
            "geometric_mean_leak_rate".into(),
            (leaks.iter().map(|x| x.ln()).sum::<f64>() / leaks.len() as f64).exp(),
        );
    }
    agg.insert("max_m_j0n".into(), ran.iter().filter_map(|o| o.max_m_j0n).fold(0.0, f64::max));
    let pass = !ran.is_empty() && !aborted && frac >= cfg.success_threshold;
    Ok(RunReport {
        mode: Mode::Simulate,
        config: cfg,
        outcomes: all,
        aggregate: agg,
        pass,
        aborted,
    })
}
