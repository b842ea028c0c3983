//! Configuration, per-seed orchestration and report files for the five
//! experiment modes.

pub mod config;
pub mod measure;
pub mod report;
pub mod search;
pub mod simulate;
pub mod sweep;
pub mod verify;

pub use config::{CalibrationSettings, ExperimentConfig, GridPoint, MeasureSettings, Mode, NormalFormSettings, SeedSpec};
pub use measure::{battery_forms, run_measure, MeasureOutcome};
pub use report::{write_csv, write_measure, write_simulate, write_sweep, write_verify, RunReport};
pub use search::{examine_seed, examine_seeds, screened_seeds, AcceptedSeed, SeedOutcome, SeedStatus};
pub use simulate::{calibrate_leak, localization_time, run_simulate, sech_packet, LeakCalibration, SimulateOutcome};
pub use sweep::{run_point, run_sweep, sweep_rows, PointOutcome, SweepRow};
pub use verify::{conjugacy_check, run_normal_form_mode, run_verify, ConjugacyReport, VerifyOutcome};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}
