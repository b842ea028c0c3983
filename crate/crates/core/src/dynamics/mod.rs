//! Split-step integration of the lattice equation with mass, flux and
//! energy observers.

pub mod flow;
pub mod integrate;
pub mod io;
pub mod observe;
pub mod propagator;
pub mod reference;
pub mod split;

pub use flow::{composed_transform, generator_flow, hamiltonian_flow};
pub use integrate::{integrate, sample_steps, IntegratorConfig, ObserverSeries, Sample, Trajectory};
pub use io::{read_series_csv, read_snapshot, write_series_csv, write_snapshot, Snapshot};
pub use observe::{edge_mass, lattice_energy, lattice_flux, mass_flux, truncated_mass};
pub use propagator::{HoppingBasis, Scratch};
pub use reference::{reference_linear_evolution, LinearReference, MAX_DENSE_SITES};
pub use split::{default_dt, diagonal_flow, hopping_flow, strang_step, SplitStepper};

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("non-finite amplitude at t = {}", .last_good.t)]
    NonFinite { last_good: Box<Snapshot>, series: Box<ObserverSeries> },
    #[error("edge mass {mass:e} exceeds {limit:e} at t = {t}")]
    EdgeMass {
        t: f64,
        mass: f64,
        limit: f64,
        last_good: Box<Snapshot>,
        series: Box<ObserverSeries>,
    },
    #[error("box of {sites} sites exceeds the dense limit {max}")]
    BoxTooLarge { sites: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
