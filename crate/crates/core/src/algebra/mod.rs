//! Sparse polynomial Hamiltonians in the lattice variables `(q_j, q̄_j)`.

pub mod coeff;
pub mod hamiltonian;
pub mod index;
pub mod lattice;
pub mod poly;

pub use coeff::{Coefficient, ExactComplex};
pub use hamiltonian::{monomial_value, polynomial_conj_gradient, DecayViolation, Hamiltonian, HamiltonianJson};
pub use index::{MultiIndex, SiteExponent};
pub use lattice::{LatticeBox, State};
pub use poly::Polynomial;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("negative exponent at site {site}: ({n}, {nc})")]
    NegativeExponent { site: i64, n: i64, nc: i64 },
    #[error("site {0} does not fit in a 32-bit lattice index")]
    SiteOutOfRange(i64),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    RealityViolation { residue: f64, tolerance: f64 },
    #[error("lattice box half-width {half_width} is below the required {required}")]
    BoxTooSmall { half_width: u32, required: u32 },
    #[error("coupling {name} = {value} is outside [0, 1)")]
    CouplingOutOfRange { name: &'static str, value: f64 },
    #[error("potential does not cover site {0}")]
    PotentialMissing(i32),
    #[error("state lives on a box of half-width {got}, expected {expected}")]
    BoxMismatch { got: u32, expected: u32 },
    #[error("malformed hamiltonian json: {0}")]
    Format(String),
}
