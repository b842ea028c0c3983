//! Per-seed pipeline shared by the modes: sample the potential, scan for a
//! window, run the normal form.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::HarnessError;
use crate::algebra::{Hamiltonian, LatticeBox};
use crate::disorder::{scan_j0, DisorderRealization};
use crate::exec::par_map;
use crate::normal_form::{run_normal_form, NormalFormOptions, NormalFormResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SeedStatus {
    Accepted,
    /// No candidate window passed the screen.
    ScanFailure,
    /// The normal form stopped with an error (small divisor, round limit, …).
    Rejected { error: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub j0: Option<i64>,
    #[serde(flatten)]
    pub status: SeedStatus,
}

impl SeedOutcome {
    pub fn accepted(&self) -> bool {
        self.status == SeedStatus::Accepted
    }
}

/// Everything downstream stages need from an accepted seed.
#[derive(Clone, Debug)]
pub struct AcceptedSeed {
    pub seed: u64,
    pub j0: i64,
    pub realization: DisorderRealization,
    pub initial: Hamiltonian,
    pub result: NormalFormResult,
}

pub fn lattice(cfg: &ExperimentConfig) -> Result<LatticeBox, HarnessError> {
    LatticeBox::new(cfg.half_width).map_err(|e| HarnessError::Config(e.to_string()))
}

pub fn realization(cfg: &ExperimentConfig, seed: u64) -> Result<DisorderRealization, HarnessError> {
    let b = lattice(cfg)?;
    match &cfg.potential {
        Some(v) => DisorderRealization::from_values(b, v.clone()).map_err(|e| HarnessError::Config(e.to_string())),
        None => Ok(DisorderRealization::sample(seed, b)),
    }
}

/// The fixed window, the scanned one, or `None`.
pub fn window(cfg: &ExperimentConfig, v: &DisorderRealization) -> Result<Option<i64>, HarnessError> {
    if let Some(j0) = cfg.j0 {
        return Ok(Some(j0));
    }
    if cfg.eps_total() == 0.0 {
        return Ok(Some(cfg.jbar0));
    }
    scan_j0(
        v,
        cfg.jbar0,
        cfg.n_resolved(),
        cfg.eps_total(),
        cfg.order,
        cfg.normal_form.constants(),
        cfg.normal_form.screen,
    )
    .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Scan and normal form for one seed. Configuration problems are errors;
/// a failed scan or normal form is an outcome.
pub fn examine_seed(
    cfg: &ExperimentConfig,
    seed: u64,
    opts: &NormalFormOptions,
) -> Result<(SeedOutcome, Option<AcceptedSeed>), HarnessError> {
    let v = realization(cfg, seed)?;
    let Some(j0) = window(cfg, &v)? else {
        return Ok((
            SeedOutcome {
                seed,
                j0: None,
                status: SeedStatus::ScanFailure,
            },
            None,
        ));
    };
    let h = Hamiltonian::initial(&v, cfg.eps1, cfg.eps2).map_err(|e| HarnessError::Config(e.to_string()))?;
    match run_normal_form(&h, &v, cfg.eps_total(), cfg.order, j0, cfg.n_resolved(), opts) {
        Ok(result) => Ok((
            SeedOutcome {
                seed,
                j0: Some(j0),
                status: SeedStatus::Accepted,
            },
            Some(AcceptedSeed {
                seed,
                j0,
                realization: v,
                initial: h,
                result,
            }),
        )),
        Err(crate::normal_form::NormalFormError::Algebra(e)) => Err(HarnessError::Config(e.to_string())),
        Err(crate::normal_form::NormalFormError::InvalidParameter(e)) => Err(HarnessError::Config(e)),
        Err(e) => Ok((
            SeedOutcome {
                seed,
                j0: Some(j0),
                status: SeedStatus::Rejected { error: e.to_string() },
            },
            None,
        )),
    }
}

/// Cheap first pass: the seeds whose scan finds a window.
pub fn screened_seeds(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Vec<(u64, i64)>, HarnessError> {
    let found = par_map(seeds, |&s| realization(cfg, s).and_then(|v| window(cfg, &v)).map(|w| w.map(|j| (s, j))));
    let mut out = Vec::new();
    for f in found {
        if let Some(x) = f? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Examines `seeds` in order (in parallel batches) and keeps the first
/// `max_accepted` accepted ones; outcomes of later seeds are dropped.
pub fn examine_seeds(
    cfg: &ExperimentConfig,
    seeds: &[u64],
    opts: &NormalFormOptions,
) -> Result<(Vec<SeedOutcome>, Vec<AcceptedSeed>), HarnessError> {
    let want = cfg.max_accepted.unwrap_or(usize::MAX);
    let mut outcomes = Vec::new();
    let mut accepted = Vec::new();
    let batch = rayon_batch();
    for chunk in seeds.chunks(batch) {
        let results = par_map(chunk, |&s| examine_seed(cfg, s, opts));
        for r in results {
            if accepted.len() >= want {
                break;
            }
            let (o, a) = r?;
            outcomes.push(o);
            accepted.extend(a);
        }
        if accepted.len() >= want {
            break;
        }
    }
    Ok((outcomes, accepted))
}

fn rayon_batch() -> usize {
    4 * crate::exec::current_threads().max(1)
}
