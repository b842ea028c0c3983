//! Finite-step normal form around the barrier bands `±[a, b]`.

pub mod generator;
pub mod lie;
pub mod report;
pub mod run;
pub mod schedule;
pub mod sensitivity;

pub use generator::{build_generator, small_divisor, Generator, TargetSelection};
pub use lie::{
    extract_frequency_shift, lie_transform, lie_transform_recorded, lie_transform_replay, FrequencyShift, LieOptions, LieStats,
};
pub use report::{BarrierReport, NormalFormReport, ShiftEntry};
pub use run::{
    run_normal_form, Diagnostic, NormalFormOptions, NormalFormResult, RoundPlan, RoundRecord, Violation,
};
pub use schedule::{build_schedule, minimum_half_width, NormalFormSchedule, ScheduleConstants, ScheduleStep};
pub use sensitivity::{sensitivity_check, FailedProbe, SensitivityInput, SensitivityReport};

use crate::algebra::AlgebraError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NormalFormError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schedule exhausts the window at step {step}: [{a}, {b}] no longer contains [{}, {}]", inner.0, inner.1)]
    ScheduleInfeasible {
        step: u32,
        a: i64,
        b: i64,
        inner: (i64, i64),
    },
    #[error("coefficient thresholds do not reach ε^A within {steps} steps")]
    NoTermination { steps: u32 },
    #[error("small divisor at step {step}: |Ω({index})| = {omega:.3e} <= {threshold:.3e} ({count} offending indices)")]
    ResonanceViolation {
        step: u32,
        index: String,
        omega: f64,
        threshold: f64,
        count: usize,
    },
    #[error("Lie series did not contract within {depth} brackets (last mass {mass:.3e})")]
    Divergence { depth: u32, mass: f64 },
    #[error("step {step} still has {remaining} targets above δ after {rounds} rounds (largest {largest:.3e})")]
    RoundsExhausted {
        step: u32,
        rounds: u32,
        remaining: usize,
        largest: f64,
    },
    #[error("term count {count} exceeds the cap {cap}")]
    TermCap { count: usize, cap: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
