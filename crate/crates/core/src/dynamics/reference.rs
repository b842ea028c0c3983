//! Dense reference evolution of the linear equation `i q̇ = (V + ε1 Δ) q`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::DynamicsError;
use crate::algebra::State;

/// Largest box the dense solver accepts.
pub const MAX_DENSE_SITES: usize = 4096;

/// Eigen-decomposition of `diag(V) + ε1 Δ`, reusable across times.
#[derive(Clone, Debug)]
pub struct LinearReference {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl LinearReference {
    pub fn new(v: &[f64], eps1: f64) -> Result<Self, DynamicsError> {
        let m = v.len();
        if m > MAX_DENSE_SITES {
            return Err(DynamicsError::BoxTooLarge { sites: m, max: MAX_DENSE_SITES });
        }
        let mut a = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = v[i];
            if i + 1 < m {
                a[(i, i + 1)] = eps1;
                a[(i + 1, i)] = eps1;
            }
        }
        let eig = SymmetricEigen::new(a);
        Ok(Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Eigenvector `k` as box amplitudes.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }

    pub fn evolve(&self, q0: &State, t: f64) -> State {
        let m = self.values.len();
        let q = q0.as_slice();
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..m {
            let col = self.vectors.column(k);
            let mut c = Complex64::new(0.0, 0.0);
            for i in 0..m {
                c += q[i] * col[i];
            }
            c *= Complex64::from_polar(1.0, -self.values[k] * t);
            for i in 0..m {
                out[i] += c * col[i];
            }
        }
        State::from_vec(q0.lattice(), out).expect("same box")
    }
}

/// `exp(-i (diag V + ε1 Δ) t) q0`.
pub fn reference_linear_evolution(q0: &State, t: f64, v: &[f64], eps1: f64) -> Result<State, DynamicsError> {
    Ok(LinearReference::new(v, eps1)?.evolve(q0, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LatticeBox;

    #[test]
    fn zero_time_is_identity() {
        let b = LatticeBox::new(1).unwrap();
        let r = LinearReference::new(&[0.0, 0.0, 0.0], 0.0).unwrap();
        let q = State::from_fn(b, |j| Complex64::new(j as f64, 1.0));
        assert!(r.evolve(&q, 0.0).max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn eigenvector_picks_up_phase() {
        let b = LatticeBox::new(4).unwrap();
        let v: Vec<f64> = (0..b.len()).map(|k| 0.1 * k as f64).collect();
        let r = LinearReference::new(&v, 0.3).unwrap();
        let e = r.eigenvector(2);
        let q = State::from_vec(b, e.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap();
        let t = 7.3;
        let phase = Complex64::from_polar(1.0, -r.eigenvalues()[2] * t);
        let expect = State::from_vec(b, q.as_slice().iter().map(|z| z * phase).collect()).unwrap();
        assert!(r.evolve(&q, t).max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn oversized_box_rejected() {
        let v = vec![0.0; MAX_DENSE_SITES + 1];
        assert!(matches!(LinearReference::new(&v, 0.1), Err(DynamicsError::BoxTooLarge { .. })));
    }
}
