//! Grid fan-out over `(ε1, ε2, A)` with per-point isolation.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GridPoint, Mode};
use super::report::RunReport;
use super::simulate::run_simulate;
use super::verify::run_verify;
use super::HarnessError;
use crate::exec::par_map;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub point: GridPoint,
    pub report: Option<RunReport<serde_json::Value>>,
    pub error: Option<String>,
}

/// Runs the sweep's mode at one grid point; errors and panics become
/// the point's `error`.
pub fn run_point(base: &ExperimentConfig, p: GridPoint, mode: Mode) -> PointOutcome {
    let cfg = ExperimentConfig {
        eps1: p.eps1,
        eps2: p.eps2,
        eps: None,
        order: p.order,
        n: None,
        mode: None,
        grid: Vec::new(),
        sweep_mode: None,
        ..base.clone()
    };
    let run = catch_unwind(AssertUnwindSafe(|| match mode {
        Mode::Verify => run_verify(&cfg).map(|r| r.erase()),
        _ => run_simulate(&cfg).map(|r| r.erase()),
    }));
    match run {
        Ok(Ok(r)) => PointOutcome {
            point: p,
            report: Some(r),
            error: None,
        },
        Ok(Err(e)) => PointOutcome {
            point: p,
            report: None,
            error: Some(e.to_string()),
        },
        Err(panic) => PointOutcome {
            point: p,
            report: None,
            error: Some(format!(
                "panic: {}",
                panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            )),
        },
    }
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<RunReport<PointOutcome>, HarnessError> {
    let cfg = cfg.clone().resolve(Mode::Sweep)?;
    let mode = cfg.sweep_mode.unwrap_or(Mode::Simulate);
    let outcomes = par_map(&cfg.grid, |&p| run_point(&cfg, p, mode));
    let mut agg = BTreeMap::new();
    agg.insert("points".into(), outcomes.len() as f64);
    agg.insert("failed_points".into(), outcomes.iter().filter(|o| o.error.is_some()).count() as f64);
    let aborted = outcomes.iter().any(|o| o.report.as_ref().is_some_and(|r| r.aborted));
    let pass = outcomes.iter().all(|o| o.report.as_ref().is_some_and(|r| r.pass));
    Ok(RunReport {
        mode: Mode::Sweep,
        config: cfg,
        outcomes,
        aggregate: agg,
        pass,
        aborted,
    })
}

/// One row per grid point and aggregate metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: usize,
    pub eps1: f64,
    pub eps2: f64,
    #[serde(rename = "A")]
    pub order: f64,
    pub metric: String,
    pub value: f64,
}

pub fn sweep_rows(report: &RunReport<PointOutcome>) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for (k, o) in report.outcomes.iter().enumerate() {
        let row = |metric: &str, value: f64| SweepRow {
            point: k,
            eps1: o.point.eps1,
            eps2: o.point.eps2,
            order: o.point.order,
            metric: metric.to_string(),
            value,
        };
        match &o.report {
            Some(r) => {
                for (m, v) in &r.aggregate {
                    rows.push(row(m, *v));
                }
                rows.push(row("pass", if r.pass { 1.0 } else { 0.0 }));
            }
            None => rows.push(row("error", 1.0)),
        }
    }
    rows
}
