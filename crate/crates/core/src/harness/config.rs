//! Experiment configuration: JSON in, fully resolved echo out.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::disorder::ConstraintLimits;
use crate::normal_form::{minimum_half_width, NormalFormOptions, ScheduleConstants};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    NormalForm,
    Measure,
    Sweep,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::NormalForm => "normal-form",
            Mode::Measure => "measure",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
        }
    }
}

/// `[a, b)` written as `"a..b"`, or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range(String),
}

impl SeedSpec {
    pub fn parse_range(s: &str) -> Result<(u64, u64), HarnessError> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| HarnessError::Config(format!("seed range {s:?} is not of the form a..b")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| HarnessError::Config(format!("seed range {s:?} has a non-integer bound")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if b < a {
            return Err(HarnessError::Config(format!("seed range {s:?} is reversed")));
        }
        Ok((a, b))
    }

    pub fn seeds(&self) -> Result<Vec<u64>, HarnessError> {
        match self {
            SeedSpec::List(v) => Ok(v.clone()),
            SeedSpec::Range(s) => {
                let (a, b) = Self::parse_range(s)?;
                Ok((a..b).collect())
            }
        }
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::Range("0..10".into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Desk,
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalFormSettings {
    pub schedule: ScheduleKind,
    pub coeff_floor: Option<f64>,
    pub tail_floor: Option<f64>,
    pub prune_cap: Option<u32>,
    pub max_rounds: u32,
    pub max_depth: u32,
    pub term_cap: usize,
    /// Constraint set the window scan checks before running the normal form.
    pub screen: ConstraintLimits,
    /// Violations of each kind listed in reports (counts are always complete).
    pub max_listed: usize,
}

impl Default for NormalFormSettings {
    fn default() -> Self {
        let o = NormalFormOptions::default();
        Self {
            schedule: ScheduleKind::Desk,
            coeff_floor: None,
            tail_floor: None,
            prune_cap: None,
            max_rounds: o.max_rounds,
            max_depth: o.max_depth,
            term_cap: o.term_cap,
            screen: ConstraintLimits::screen(),
            max_listed: 20,
        }
    }
}

impl NormalFormSettings {
    pub fn constants(&self) -> ScheduleConstants {
        match self.schedule {
            ScheduleKind::Desk => ScheduleConstants::desk(),
            ScheduleKind::Literal => ScheduleConstants::literal(),
        }
    }

    pub fn options(&self) -> NormalFormOptions {
        NormalFormOptions {
            constants: self.constants(),
            tail_floor: self.tail_floor,
            coeff_floor: self.coeff_floor,
            max_depth: self.max_depth,
            max_rounds: self.max_rounds,
            term_cap: self.term_cap,
            prune_cap: self.prune_cap,
            replay: None,
            record_plan: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSettings {
    /// Random states per half-width `k` and side.
    pub states_per_width: usize,
    /// Largest `k`; defaults to `N`.
    pub max_width: Option<i64>,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            states_per_width: 4,
            max_width: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSettings {
    pub trials: u64,
    pub seed0: u64,
    /// Trials of each single-form test.
    pub form_trials: u64,
    pub form_delta: f64,
    /// ε values of the paired monotonicity test; empty uses `[ε, ε/2]`.
    pub eps_grid: Vec<f64>,
    /// Constraint set measured; defaults to the scan's.
    pub limits: Option<ConstraintLimits>,
    pub enumeration_cap: usize,
}

impl Default for MeasureSettings {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed0: 0,
            form_trials: 100_000,
            form_delta: 0.01,
            eps_grid: Vec::new(),
            limits: None,
            enumeration_cap: crate::disorder::DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub eps1: f64,
    pub eps2: f64,
    #[serde(rename = "A")]
    pub order: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub eps1: f64,
    pub eps2: f64,
    /// Echo of `ε1 + ε2`; a supplied value must agree.
    pub eps: Option<f64>,
    #[serde(rename = "A")]
    pub order: f64,
    pub delta: f64,
    pub jbar0: i64,
    /// Fixed window; skips the scan.
    pub j0: Option<i64>,
    #[serde(rename = "N")]
    pub n: Option<i64>,
    /// Box half-width.
    #[serde(rename = "L")]
    pub half_width: u32,
    pub dt: Option<f64>,
    /// Integration time; `None` uses `δ ε^{-A} / Ĉ`.
    #[serde(rename = "T")]
    pub t_end: Option<f64>,
    pub seeds: SeedSpec,
    /// Stop after this many accepted seeds.
    pub max_accepted: Option<usize>,
    /// Explicit potential from site `-L` to `L`; replaces the seeds.
    pub potential: Option<Vec<f64>>,
    /// Explicit initial datum `(re, im)` from `-L` to `L`.
    pub initial: Option<Vec<[f64; 2]>>,
    pub packet_width: f64,
    pub samples: usize,
    pub edge_width: usize,
    pub edge_limit: f64,
    pub normal_form: NormalFormSettings,
    pub sensitivity: bool,
    pub sensitivity_h: f64,
    /// Random states of the conjugacy check; 0 skips it.
    pub conjugacy_states: usize,
    pub calibration: CalibrationSettings,
    pub measure: MeasureSettings,
    /// Fraction of accepted seeds that must stay localized for `simulate` to pass.
    pub success_threshold: f64,
    pub grid: Vec<GridPoint>,
    pub sweep_mode: Option<Mode>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: None,
            eps1: 0.025,
            eps2: 0.025,
            eps: None,
            order: 2.0,
            delta: 0.01,
            jbar0: 64,
            j0: None,
            n: None,
            half_width: 256,
            dt: None,
            t_end: None,
            seeds: SeedSpec::default(),
            max_accepted: None,
            potential: None,
            initial: None,
            packet_width: 4.0,
            samples: 512,
            edge_width: 8,
            edge_limit: 1e-8,
            normal_form: NormalFormSettings::default(),
            sensitivity: true,
            sensitivity_h: 1e-5,
            conjugacy_states: 50,
            calibration: CalibrationSettings::default(),
            measure: MeasureSettings::default(),
            success_threshold: 0.8,
            grid: Vec::new(),
            sweep_mode: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn eps_total(&self) -> f64 {
        self.eps1 + self.eps2
    }

    pub fn n_resolved(&self) -> i64 {
        self.n.unwrap_or_else(|| minimum_half_width(self.order))
    }

    /// Fills the derived fields and checks ranges.
    pub fn resolve(mut self, mode: Mode) -> Result<Self, HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let eps = self.eps_total();
        if let Some(e) = self.eps {
            if (e - eps).abs() > 1e-12 {
                return bad(format!("eps = {e} disagrees with eps1 + eps2 = {eps}"));
            }
        }
        self.eps = Some(eps);
        self.mode = Some(mode);
        self.n = Some(self.n_resolved());
        for (name, x) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(0.0..1.0).contains(&x) {
                return bad(format!("{name} = {x} is outside [0, 1)"));
            }
        }
        if !(self.order > 1.0) {
            return bad(format!("A = {} must exceed 1", self.order));
        }
        if !(self.delta > 0.0) {
            return bad(format!("delta = {} must be positive", self.delta));
        }
        if self.n_resolved() <= 0 {
            return bad("N must be positive".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("dt = {dt} must be positive"));
            }
        }
        if let Some(t) = self.t_end {
            if !(t >= 0.0) {
                return bad(format!("T = {t} must be non-negative"));
            }
        }
        if let SeedSpec::Range(s) = &self.seeds {
            SeedSpec::parse_range(s)?;
        }
        if let Some(p) = &self.potential {
            if p.len() != 2 * self.half_width as usize + 1 {
                return bad(format!("potential has {} values, the box has {}", p.len(), 2 * self.half_width + 1));
            }
        }
        if let Some(q) = &self.initial {
            if q.len() != 2 * self.half_width as usize + 1 {
                return bad(format!("initial datum has {} values, the box has {}", q.len(), 2 * self.half_width + 1));
            }
        }
        if mode == Mode::Measure && self.measure.trials < 1000 {
            return bad(format!("measure needs at least 1000 trials, got {}", self.measure.trials));
        }
        if mode == Mode::Sweep {
            if self.grid.is_empty() {
                return bad("sweep needs a non-empty grid".into());
            }
            match self.sweep_mode {
                None => self.sweep_mode = Some(Mode::Simulate),
                Some(Mode::Simulate | Mode::Verify) => {}
                Some(m) => return bad(format!("sweep fans out simulate or verify, not {}", m.name())),
            }
        }
        if !(0.0..=1.0).contains(&self.success_threshold) {
            return bad("success_threshold must lie in [0, 1]".into());
        }
        Ok(self)
    }

    pub fn seed_list(&self) -> Result<Vec<u64>, HarnessError> {
        if self.potential.is_some() {
            return Ok(vec![0]);
        }
        self.seeds.seeds()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let c = ExperimentConfig::from_json("{}").unwrap().resolve(Mode::Simulate).unwrap();
        assert_eq!(c.eps, Some(0.05));
        assert_eq!(c.n, Some(32));
        assert_eq!(c.seed_list().unwrap(), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn seeds_as_list_or_range() {
        let c = ExperimentConfig::from_json(r#"{"seeds": [3, 5]}"#).unwrap();
        assert_eq!(c.seed_list().unwrap(), vec![3, 5]);
        let c = ExperimentConfig::from_json(r#"{"seeds": "4..7"}"#).unwrap();
        assert_eq!(c.seed_list().unwrap(), vec![4, 5, 6]);
        assert!(SeedSpec::parse_range("7..4").is_err());
        assert!(SeedSpec::parse_range("x").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let c = ExperimentConfig::from_json(r#"{"eps1": 0.01, "eps2": 0.01, "eps": 0.05}"#).unwrap();
        assert!(c.resolve(Mode::Verify).is_err());
        let c = ExperimentConfig::from_json(r#"{"measure": {"trials": 0}}"#).unwrap();
        assert!(matches!(c.resolve(Mode::Measure), Err(HarnessError::Config(_))));
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert!(c.resolve(Mode::Sweep).is_err());
    }
}
