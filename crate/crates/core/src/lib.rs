//! Normal-form energy barriers, disorder acceptance estimates and split-step
//! dynamics for the disordered discrete nonlinear Schrödinger lattice
//! `i q̇_j = v_j q_j + ε1 (q_{j-1} + q_{j+1}) + ε2 |q_j|² q_j`.

pub mod algebra;
pub mod disorder;
pub mod dynamics;
pub mod exec;
pub mod harness;
pub mod normal_form;
