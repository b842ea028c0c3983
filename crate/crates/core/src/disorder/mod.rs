//! Random potentials, small-divisor constraint sets and their measure.

pub mod constraints;
pub mod measure;
pub mod potential;
pub mod stats;

pub use constraints::{
    acceptable_set_check, enumerate_all, enumerate_constraint_indices, CompiledConstraints, ConstraintIndexSet,
    ConstraintLimits, ConstraintViolation, LinearForm, StepConstraints, DEFAULT_ENUMERATION_CAP,
};
pub use measure::{
    j0_candidates, monte_carlo_acceptance, paired_monotonicity, scan_j0, screen_window, single_form_measure_test,
    AcceptanceParams, AcceptanceReport, MonotonicityReport, SingleFormReport, TrialRow,
};
pub use potential::{site_value, DisorderRealization};
pub use stats::{ks_critical, ks_statistic, linear_fit, wilson, Proportion};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DisorderError {
    #[error("constraint enumeration passed the cap of {cap} indices (reached {count}); lower A or the degree limit")]
    EnumerationCap { count: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
