//! Acceptable-set measure battery.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{ExperimentConfig, Mode};
use super::report::RunReport;
use super::HarnessError;
use crate::algebra::{MultiIndex, SiteExponent};
use crate::disorder::{
    monte_carlo_acceptance, paired_monotonicity, single_form_measure_test, AcceptanceParams, AcceptanceReport,
    MonotonicityReport, SingleFormReport,
};

/// Forms of the single-form battery: one on two sites, two on three.
pub fn battery_forms() -> Vec<MultiIndex> {
    vec![
        MultiIndex::pair(0, 1),
        MultiIndex::from_sorted([SiteExponent::new(0, 1, 0), SiteExponent::new(1, 1, 0), SiteExponent::new(2, 0, 2)]),
        MultiIndex::from_sorted([SiteExponent::new(0, 2, 0), SiteExponent::new(1, 0, 1), SiteExponent::new(2, 0, 1)]),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureOutcome {
    SingleForm(SingleFormReport),
    Acceptance(Box<AcceptanceReport>),
    Monotonicity(MonotonicityReport),
}

pub fn run_measure(cfg: &ExperimentConfig) -> Result<RunReport<MeasureOutcome>, HarnessError> {
    let cfg = cfg.clone().resolve(Mode::Measure)?;
    let m = &cfg.measure;
    let cfg_err = |e: crate::disorder::DisorderError| HarnessError::Config(e.to_string());
    let mut outcomes = Vec::new();
    let mut agg = BTreeMap::new();
    let mut pass = true;
    for (k, n) in battery_forms().iter().enumerate() {
        let r = single_form_measure_test(n, m.form_delta, m.form_trials, m.seed0 + k as u64).map_err(cfg_err)?;
        pass &= r.passes;
        agg.insert(format!("single_form_{k}_estimate"), r.hits.estimate);
        agg.insert(format!("single_form_{k}_bound"), r.bound);
        outcomes.push(MeasureOutcome::SingleForm(r));
    }
    let params = AcceptanceParams {
        eps: cfg.eps_total(),
        order: cfg.order,
        j0: cfg.j0.unwrap_or(cfg.jbar0),
        n: cfg.n_resolved(),
        constants: cfg.normal_form.constants(),
        limits: m.limits.unwrap_or(cfg.normal_form.screen),
        cap: m.enumeration_cap,
    };
    let acc = monte_carlo_acceptance(&params, m.trials, m.seed0).map_err(cfg_err)?;
    pass &= acc.failure_within_bound;
    agg.insert("acceptance".into(), acc.acceptance.estimate);
    agg.insert("acceptance_wilson_low".into(), acc.acceptance.wilson_low);
    agg.insert("acceptance_wilson_high".into(), acc.acceptance.wilson_high);
    agg.insert("union_bound".into(), acc.union_bound);
    agg.insert("union_bound_forms".into(), acc.union_bound_forms);
    agg.insert("per_site_failure".into(), acc.per_site_failure);
    outcomes.push(MeasureOutcome::Acceptance(Box::new(acc)));
    let grid = if m.eps_grid.is_empty() {
        vec![cfg.eps_total(), cfg.eps_total() / 2.0]
    } else {
        m.eps_grid.clone()
    };
    let mono = paired_monotonicity(&params, &grid, m.trials, m.seed0).map_err(cfg_err)?;
    pass &= mono.non_decreasing;
    agg.insert("monotone".into(), if mono.non_decreasing { 1.0 } else { 0.0 });
    outcomes.push(MeasureOutcome::Monotonicity(mono));
    Ok(RunReport {
        mode: Mode::Measure,
        config: cfg,
        outcomes,
        aggregate: agg,
        pass,
        aborted: false,
    })
}
