//! Strang splitting of the lattice equation into the on-site rotation and
//! the linear hopping flow, both solved exactly.

use num_complex::Complex64;

use super::propagator::{HoppingBasis, Scratch};
use crate::algebra::State;

/// `q_j ← exp(-i (v_j + ε2 |q_j|²) dt) q_j`; `v` is listed by box offset.
pub fn diagonal_flow(q: &mut State, dt: f64, v: &[f64], eps2: f64) {
    for (z, vj) in q.as_mut_slice().iter_mut().zip(v) {
        let phase = -(vj + eps2 * z.norm_sqr()) * dt;
        *z *= Complex64::from_polar(1.0, phase);
    }
}

/// `q ← exp(-i ε1 Δ dt) q`. Builds the eigenbasis on every call; use
/// [`SplitStepper`] for repeated steps.
pub fn hopping_flow(q: &mut State, dt: f64, eps1: f64) {
    let basis = HoppingBasis::new(q.as_slice().len());
    let phases = basis.phases(eps1, dt);
    basis.apply(q.as_mut_slice(), &phases, &mut Scratch::default());
}

/// One Strang step: half diagonal, full hopping, half diagonal.
pub fn strang_step(q: &mut State, dt: f64, v: &[f64], eps1: f64, eps2: f64) {
    diagonal_flow(q, 0.5 * dt, v, eps2);
    hopping_flow(q, dt, eps1);
    diagonal_flow(q, 0.5 * dt, v, eps2);
}

/// Strang stepper with the hopping eigenbasis and step phases precomputed.
#[derive(Clone, Debug)]
pub struct SplitStepper {
    basis: HoppingBasis,
    phases: Vec<Complex64>,
    v: Vec<f64>,
    eps1: f64,
    eps2: f64,
    dt: f64,
    scratch: Scratch,
}

impl SplitStepper {
    pub fn new(v: Vec<f64>, eps1: f64, eps2: f64, dt: f64) -> Self {
        let basis = HoppingBasis::new(v.len());
        let phases = basis.phases(eps1, dt);
        Self {
            basis,
            phases,
            v,
            eps1,
            eps2,
            dt,
            scratch: Scratch::default(),
        }
    }

    pub fn with_basis(basis: HoppingBasis, v: Vec<f64>, eps1: f64, eps2: f64, dt: f64) -> Self {
        assert_eq!(basis.len(), v.len());
        let phases = basis.phases(eps1, dt);
        Self {
            basis,
            phases,
            v,
            eps1,
            eps2,
            dt,
            scratch: Scratch::default(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn potential(&self) -> &[f64] {
        &self.v
    }

    pub fn step(&mut self, q: &mut State) {
        if self.eps1 == 0.0 {
            diagonal_flow(q, self.dt, &self.v, self.eps2);
            return;
        }
        diagonal_flow(q, 0.5 * self.dt, &self.v, self.eps2);
        self.basis.apply(q.as_mut_slice(), &self.phases, &mut self.scratch);
        diagonal_flow(q, 0.5 * self.dt, &self.v, self.eps2);
    }
}

/// `0.05 / max(1, max v + 2 ε1 + ε2 max |q|²)`.
pub fn default_dt(v: &[f64], eps1: f64, eps2: f64, q: &State) -> f64 {
    let vmax = v.iter().copied().fold(0.0, f64::max);
    let qmax = q.as_slice().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    0.05 / (vmax + 2.0 * eps1 + eps2 * qmax).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LatticeBox;

    #[test]
    fn diagonal_keeps_moduli() {
        let b = LatticeBox::new(3).unwrap();
        let mut q = State::from_fn(b, |j| Complex64::new(0.1 * j as f64, 0.3));
        let before: Vec<f64> = q.as_slice().iter().map(|z| z.norm()).collect();
        diagonal_flow(&mut q, 0.7, &[0.1, 0.5, 0.9, 0.2, 0.4, 0.3, 0.8], 0.6);
        for (z, m) in q.as_slice().iter().zip(before) {
            assert!((z.norm() - m).abs() < 1e-15);
        }
    }

    #[test]
    fn single_site_phase() {
        let b = LatticeBox::new(1).unwrap();
        let mut q = State::zeros(b);
        q.set(0, Complex64::new(1.0, 0.0));
        diagonal_flow(&mut q, std::f64::consts::PI, &[0.0; 3], 1.0);
        assert!((q.get(0) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_site_rotation() {
        // exp(-i ε1 σx t) = cos(ε1 t) I - i sin(ε1 t) σx on a two-site box
        let basis = HoppingBasis::new(2);
        let (eps1, t) = (0.3, 1.7);
        let mut q = vec![Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.5)];
        let orig = q.clone();
        basis.apply(&mut q, &basis.phases(eps1, t), &mut Scratch::default());
        let (c, s) = ((eps1 * t).cos(), (eps1 * t).sin());
        let mi = Complex64::new(0.0, -1.0);
        let expect = [orig[0] * c + mi * s * orig[1], orig[1] * c + mi * s * orig[0]];
        for k in 0..2 {
            assert!((q[k] - expect[k]).norm() < 1e-14);
        }
    }
}
