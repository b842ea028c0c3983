use num_complex::Complex64;
use rustc_hash::FxHashSet;
use serde::Serialize;

use super::NormalFormError;
use crate::algebra::{Hamiltonian, MultiIndex, Polynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct LieOptions {
    /// Stop once a new order carries less ℓ¹ mass than this.
    pub tail_floor: f64,
    /// Individual coefficients below this are moved to the remainder.
    pub coeff_floor: f64,
    pub max_depth: u32,
    /// Terms meeting `region` with `Δ ≥ cap` or `|n| ≥ cap` are dropped.
    pub cap: u32,
    /// `(lo, hi)`: sites with `lo ≤ |j| ≤ hi`.
    pub region: (i64, i64),
    pub term_cap: usize,
}

impl LieOptions {
    fn keeps(&self, n: &MultiIndex, c: &Complex64) -> bool {
        if c.norm() < self.coeff_floor {
            return false;
        }
        let (lo, hi) = self.region;
        let meets = n.support().any(|j| {
            let a = j.unsigned_abs() as i64;
            a >= lo && a <= hi
        });
        !meets || (n.diameter() < self.cap && n.degree() < self.cap)
    }
}

/// ℓ¹ accounting of one transform: every generated coefficient is either
/// kept or dropped.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LieStats {
    pub depth: u32,
    pub generated_mass: f64,
    pub kept_mass: f64,
    pub dropped_mass: f64,
    /// Estimated mass of the orders beyond `depth`.
    pub tail_estimate: f64,
}

/// `exp(ad_F) H = H + {H,F} + ½{{H,F},F} + …`, truncated when an order's
/// mass drops below the tail floor. Dropped and tail mass go to the
/// remainder of the returned Hamiltonian.
pub fn lie_transform(
    h: &Hamiltonian,
    f: &Polynomial<Complex64>,
    opts: &LieOptions,
) -> Result<(Hamiltonian, LieStats), NormalFormError> {
    lie_transform_recorded(h, f, opts, None)
}

/// [`lie_transform`] that also records, per order, the indices it kept.
pub fn lie_transform_recorded(
    h: &Hamiltonian,
    f: &Polynomial<Complex64>,
    opts: &LieOptions,
    mut record: Option<&mut Vec<FxHashSet<MultiIndex>>>,
) -> Result<(Hamiltonian, LieStats), NormalFormError> {
    let mut stats = LieStats::default();
    if f.is_empty() {
        return Ok((h.clone(), stats));
    }
    let mut out = h.clone();
    let mut order = h.bracket_with(f);
    let mut prev_mass = f64::INFINITY;
    for k in 1..=opts.max_depth {
        if k > 1 {
            order = order.bracket(f).scale(&Complex64::new(1.0 / k as f64, 0.0));
        }
        stats.depth = k;
        let generated = order.l1_norm();
        stats.generated_mass += generated;
        let mut dropped = 0.0;
        order.retain(|n, c| {
            let keep = opts.keeps(n, c);
            if !keep {
                dropped += c.norm();
            }
            keep
        });
        stats.dropped_mass += dropped;
        if let Some(rec) = record.as_mut() {
            rec.push(order.iter().map(|(n, _)| n.clone()).collect());
        }
        stats.kept_mass += order.l1_norm();
        out.terms_mut().add_assign(&order);
        if out.len() > opts.term_cap {
            return Err(NormalFormError::TermCap {
                count: out.len(),
                cap: opts.term_cap,
            });
        }
        if generated < opts.tail_floor {
            // geometric estimate of the orders not summed
            let ratio = if prev_mass.is_finite() && prev_mass > 0.0 {
                generated / prev_mass
            } else {
                0.0
            };
            stats.tail_estimate = if ratio < 1.0 {
                generated * ratio / (1.0 - ratio)
            } else {
                generated * opts.max_depth as f64
            };
            let mut final_h = out;
            final_h.symmetrize();
            final_h.add_remainder(stats.dropped_mass + stats.tail_estimate);
            return Ok((final_h, stats));
        }
        prev_mass = generated;
    }
    Err(NormalFormError::Divergence {
        depth: opts.max_depth,
        mass: prev_mass,
    })
}

/// Sum exactly `keep.len()` orders of the series, keeping at order `k` only
/// the indices in `keep[k - 1]`. Used to repeat a transform at a nearby
/// potential with the same truncation, so the result depends smoothly on the
/// coefficients.
pub fn lie_transform_replay(
    h: &Hamiltonian,
    f: &Polynomial<Complex64>,
    keep: &[FxHashSet<MultiIndex>],
) -> (Hamiltonian, LieStats) {
    let mut stats = LieStats::default();
    if f.is_empty() {
        return (h.clone(), stats);
    }
    let mut out = h.clone();
    let mut order = h.bracket_with(f);
    for (k, kept_here) in (1..).zip(keep) {
        if k > 1 {
            order = order.bracket(f).scale(&Complex64::new(1.0 / k as f64, 0.0));
        }
        stats.depth = k;
        stats.generated_mass += order.l1_norm();
        let mut dropped = 0.0;
        order.retain(|n, c| {
            let kept = kept_here.contains(n);
            if !kept {
                dropped += c.norm();
            }
            kept
        });
        stats.dropped_mass += dropped;
        stats.kept_mass += order.l1_norm();
        out.terms_mut().add_assign(&order);
    }
    out.symmetrize();
    out.add_remainder(stats.dropped_mass);
    (out, stats)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FrequencyShift {
    /// `(site, w_j)` in site order.
    pub shifts: Vec<(i32, f64)>,
}

impl FrequencyShift {
    pub fn max_abs(&self) -> f64 {
        self.shifts.iter().map(|(_, w)| w.abs()).fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: &Self) {
        let mut all: std::collections::BTreeMap<i32, f64> = self.shifts.iter().copied().collect();
        for &(j, w) in &other.shifts {
            *all.entry(j).or_default() += w;
        }
        self.shifts = all.into_iter().collect();
    }
}

/// Move every `κ |q_j|²` term into the diagonal. The frequency shift is
/// `w_j = 2κ`.
pub fn extract_frequency_shift(h: &Hamiltonian) -> (Hamiltonian, FrequencyShift) {
    let mut out = h.clone();
    let mut found: Vec<(i32, f64)> = h
        .terms()
        .iter()
        .filter_map(|(n, c)| n.resonant_quadratic_site().map(|j| (j, c.re)))
        .collect();
    found.sort_by_key(|(j, _)| *j);
    for &(j, kappa) in &found {
        out.terms_mut().remove(&MultiIndex::single(j, 1, 1));
        out.add_diagonal(j, kappa);
    }
    let shifts = found.into_iter().map(|(j, k)| (j, 2.0 * k)).collect();
    (out, FrequencyShift { shifts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LatticeBox;

    fn opts() -> LieOptions {
        LieOptions {
            tail_floor: 1e-14,
            coeff_floor: 0.0,
            max_depth: 40,
            cap: 100,
            region: (0, 100),
            term_cap: 1_000_000,
        }
    }

    #[test]
    fn zero_generator_is_identity() {
        let lattice = LatticeBox::new(3).unwrap();
        let h = Hamiltonian::diagonal_only(lattice, |j| j as f64);
        let (out, stats) = lie_transform(&h, &Polynomial::new(), &opts()).unwrap();
        assert_eq!(out, h);
        assert_eq!(stats.dropped_mass, 0.0);
    }

    #[test]
    fn shift_moves_into_diagonal() {
        let lattice = LatticeBox::new(6).unwrap();
        let mut h = Hamiltonian::diagonal_only(lattice, |_| 0.25);
        h.terms_mut().add_term(MultiIndex::single(5, 1, 1), Complex64::new(0.001, 0.0));
        h.terms_mut().add_term(MultiIndex::single(5, 2, 2), Complex64::new(0.01, 0.0));
        let (out, w) = extract_frequency_shift(&h);
        assert_eq!(out.diagonal_at(5), 0.251);
        assert_eq!(out.len(), 1);
        assert_eq!(w.shifts, vec![(5, 0.002)]);
        let (same, none) = extract_frequency_shift(&out);
        assert_eq!(same, out);
        assert!(none.shifts.is_empty());
    }

    #[test]
    fn quadratic_rotation_sums_to_closed_form() {
        // H = ½(|q0|² + 0·|q1|²), F = θ(q0 q̄1 - q1 q̄0): a real rotation by θ.
        let lattice = LatticeBox::new(2).unwrap();
        let h = Hamiltonian::diagonal_only(lattice, |j| if j == 0 { 0.5 } else { 0.0 });
        let theta = 0.3;
        let mut f = Polynomial::new();
        f.add_term(MultiIndex::pair(0, 1), Complex64::new(theta, 0.0));
        f.add_term(MultiIndex::pair(1, 0), Complex64::new(-theta, 0.0));
        assert!(f.is_anti_real());
        let (out, _) = lie_transform(&h, &f, &opts()).unwrap();
        let (out, _) = extract_frequency_shift(&out);
        let (c, s) = (theta.cos(), theta.sin());
        let d0 = out.diagonal_at(0);
        let d1 = out.diagonal_at(1);
        let cross = out.terms().coefficient(&MultiIndex::pair(0, 1));
        assert!((d0 + d1 - 0.5).abs() < 1e-13);
        assert!(((d0 - d1).abs() - 0.5 * (c * c - s * s).abs()).abs() < 1e-13);
        assert!((cross.norm() - 0.5 * c * s).abs() < 1e-13);
    }
}
