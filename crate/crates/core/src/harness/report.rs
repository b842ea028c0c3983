//! Run reports and their files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Mode};
use super::measure::MeasureOutcome;
use super::simulate::SimulateOutcome;
use super::sweep::{sweep_rows, PointOutcome};
use super::verify::VerifyOutcome;
use super::HarnessError;
use crate::dynamics::write_series_csv;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport<T> {
    pub mode: Mode,
    /// Resolved configuration.
    pub config: ExperimentConfig,
    pub outcomes: Vec<T>,
    pub aggregate: BTreeMap<String, f64>,
    pub pass: bool,
    /// A trajectory stopped on a non-finite value or edge mass.
    pub aborted: bool,
}

impl<T: Serialize> RunReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn erase(self) -> RunReport<serde_json::Value> {
        RunReport {
            mode: self.mode,
            config: self.config,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| serde_json::to_value(o).expect("outcomes serialize"))
                .collect(),
            aggregate: self.aggregate,
            pass: self.pass,
            aborted: self.aborted,
        }
    }

    /// 0 pass, 1 certificate failure, 3 numerical abort.
    pub fn exit_code(&self) -> i32 {
        if self.aborted {
            3
        } else if self.pass {
            0
        } else {
            1
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io(format!("{}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn config_line(cfg: &ExperimentConfig) -> String {
    format!("# config: {}\n", serde_json::to_string(cfg).expect("config serializes"))
}

/// CSV of serializable rows, preceded by a `#` line holding the config.
pub fn write_csv<R: Serialize>(path: &Path, cfg: &ExperimentConfig, rows: &[R]) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    let body = w.into_inner().map_err(|e| io_err(path, e))?;
    let mut text = config_line(cfg).into_bytes();
    text.extend(body);
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn prepare(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_simulate(dir: &Path, r: &RunReport<SimulateOutcome>) -> Result<(), HarnessError> {
    prepare(dir)?;
    write_text(&dir.join("report.json"), &r.to_json())?;
    let series_dir = dir.join("series");
    prepare(&series_dir)?;
    for o in &r.outcomes {
        if let Some(s) = &o.series {
            let p = series_dir.join(format!("seed_{}.csv", o.seed));
            write_series_csv(&p, s).map_err(|e| io_err(&p, e))?;
            let body = fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
            write_text(&p, &(config_line(&r.config) + &body))?;
        }
    }
    Ok(())
}

pub fn write_verify(dir: &Path, r: &RunReport<VerifyOutcome>) -> Result<(), HarnessError> {
    prepare(dir)?;
    write_text(&dir.join("report.json"), &r.to_json())?;
    let cert_dir = dir.join("certificates");
    prepare(&cert_dir)?;
    for o in &r.outcomes {
        if let Some(c) = &o.report {
            let doc = serde_json::json!({ "config": r.config, "seed": o.seed, "j0": o.j0, "certificate": c });
            let text = serde_json::to_string_pretty(&doc).expect("certificates serialize");
            write_text(&cert_dir.join(format!("seed_{}.json", o.seed)), &text)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FormRow<'a> {
    index: &'a str,
    delta: f64,
    trials: u64,
    estimate: f64,
    sigma: f64,
    wilson_low: f64,
    wilson_high: f64,
    bound: f64,
    passes: bool,
}

pub fn write_measure(dir: &Path, r: &RunReport<MeasureOutcome>) -> Result<(), HarnessError> {
    prepare(dir)?;
    let mut forms = Vec::new();
    for o in &r.outcomes {
        match o {
            MeasureOutcome::SingleForm(s) => forms.push(FormRow {
                index: &s.index,
                delta: s.delta,
                trials: s.trials,
                estimate: s.hits.estimate,
                sigma: s.hits.sigma,
                wilson_low: s.hits.wilson_low,
                wilson_high: s.hits.wilson_high,
                bound: s.bound,
                passes: s.passes,
            }),
            MeasureOutcome::Acceptance(a) => write_csv(&dir.join("acceptance_trials.csv"), &r.config, &a.rows)?,
            MeasureOutcome::Monotonicity(_) => {}
        }
    }
    write_csv(&dir.join("single_forms.csv"), &r.config, &forms)?;
    // trial rows live in the CSV
    let mut slim = r.clone();
    for o in &mut slim.outcomes {
        if let MeasureOutcome::Acceptance(a) = o {
            a.rows.clear();
        }
    }
    write_text(&dir.join("report.json"), &slim.to_json())
}

pub fn write_sweep(dir: &Path, r: &RunReport<PointOutcome>) -> Result<(), HarnessError> {
    prepare(dir)?;
    write_text(&dir.join("report.json"), &r.to_json())?;
    write_csv(&dir.join("sweep.csv"), &r.config, &sweep_rows(r))
}
