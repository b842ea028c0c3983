//! Observables along a trajectory.

use crate::algebra::{Hamiltonian, State};

/// `M_{j0} = Σ_{|j| > j0} |q_j|²`.
pub fn truncated_mass(q: &State, j0: i64) -> f64 {
    q.lattice()
        .sites()
        .zip(q.as_slice())
        .filter(|(j, _)| (j.unsigned_abs() as i64) > j0)
        .map(|(_, z)| z.norm_sqr())
        .sum()
}

/// `4 Im Σ_{|j| > j0} q̄_j ∂H/∂q̄_j`, the rate of change of
/// [`truncated_mass`] along the flow `q̇ = -2i ∂H/∂q̄`.
pub fn mass_flux(h: &Hamiltonian, q: &State, j0: i64) -> f64 {
    let g = h.conj_gradient(q);
    4.0 * q
        .lattice()
        .sites()
        .zip(q.as_slice().iter().zip(&g))
        .filter(|(j, _)| (j.unsigned_abs() as i64) > j0)
        .map(|(_, (z, d))| (z.conj() * d).im)
        .sum::<f64>()
}

/// Flux through `|j| = j0` for the lattice equation itself: only the two
/// hopping links across the cut carry mass.
pub fn lattice_flux(q: &State, eps1: f64, j0: i64) -> f64 {
    let j0 = j0 as i32;
    let link = |inner: i32, outer: i32| 2.0 * eps1 * (q.get(outer).conj() * q.get(inner)).im;
    link(j0, j0 + 1) + link(-j0, -j0 - 1)
}

/// `½ (Σ v|q|² + ε1 Σ 2 Re(q̄_j q_{j+1}) + ½ ε2 Σ |q|⁴)`; `v` by box offset.
pub fn lattice_energy(q: &State, v: &[f64], eps1: f64, eps2: f64) -> f64 {
    let a = q.as_slice();
    let mut e = 0.0;
    for (k, z) in a.iter().enumerate() {
        let m = z.norm_sqr();
        e += v[k] * m + 0.5 * eps2 * m * m;
        if k + 1 < a.len() {
            e += 2.0 * eps1 * (z.conj() * a[k + 1]).re;
        }
    }
    0.5 * e
}

/// Mass on the `width` outermost sites at each end of the box.
pub fn edge_mass(q: &State, width: usize) -> f64 {
    let a = q.as_slice();
    let w = width.min(a.len() / 2);
    a[..w].iter().chain(&a[a.len() - w..]).map(|z| z.norm_sqr()).sum()
}
