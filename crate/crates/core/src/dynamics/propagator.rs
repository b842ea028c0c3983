//! Exact hopping propagator `exp(-i ε1 Δ t)` on a box with zero boundary.
//!
//! The nearest-neighbour matrix on `M` sites has eigenvalues
//! `λ_k = 2 cos(kπ/(M+1))` and the orthonormal sine eigenvectors
//! `φ_k(m) = sqrt(2/(M+1)) sin(mkπ/(M+1))`; the eigenvector matrix is symmetric
//! and orthogonal, so one matrix serves for both transforms.

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct HoppingBasis {
    m: usize,
    /// Row-major `φ_k(m)`.
    phi: Vec<f64>,
    eigenvalues: Vec<f64>,
}

impl HoppingBasis {
    pub fn new(m: usize) -> Self {
        let scale = (2.0 / (m as f64 + 1.0)).sqrt();
        let w = std::f64::consts::PI / (m as f64 + 1.0);
        let mut phi = vec![0.0; m * m];
        for k in 0..m {
            for i in 0..m {
                phi[k * m + i] = scale * (((k + 1) * (i + 1)) as f64 * w).sin();
            }
        }
        let eigenvalues = (1..=m).map(|k| 2.0 * (k as f64 * w).cos()).collect();
        Self { m, phi, eigenvalues }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Phase factors `exp(-i ε1 λ_k dt)` for one step.
    pub fn phases(&self, eps1: f64, dt: f64) -> Vec<Complex64> {
        self.eigenvalues
            .iter()
            .map(|l| Complex64::from_polar(1.0, -eps1 * l * dt))
            .collect()
    }

    fn transform(&self, re: &[f64], im: &[f64], out_re: &mut [f64], out_im: &mut [f64]) {
        for k in 0..self.m {
            let row = &self.phi[k * self.m..(k + 1) * self.m];
            let (mut a, mut b) = (0.0, 0.0);
            for ((p, x), y) in row.iter().zip(re).zip(im) {
                a += p * x;
                b += p * y;
            }
            out_re[k] = a;
            out_im[k] = b;
        }
    }

    /// `q ← Φ diag(phases) Φ q`.
    pub fn apply(&self, q: &mut [Complex64], phases: &[Complex64], scratch: &mut Scratch) {
        assert_eq!(q.len(), self.m);
        scratch.resize(self.m);
        let Scratch { re, im, cre, cim } = scratch;
        for (i, z) in q.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        self.transform(re, im, cre, cim);
        for k in 0..self.m {
            let z = Complex64::new(cre[k], cim[k]) * phases[k];
            cre[k] = z.re;
            cim[k] = z.im;
        }
        self.transform(cre, cim, re, im);
        for (i, z) in q.iter_mut().enumerate() {
            *z = Complex64::new(re[i], im[i]);
        }
    }
}

/// Work buffers reused across steps.
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    re: Vec<f64>,
    im: Vec<f64>,
    cre: Vec<f64>,
    cim: Vec<f64>,
}

impl Scratch {
    fn resize(&mut self, m: usize) {
        for v in [&mut self.re, &mut self.im, &mut self.cre, &mut self.cim] {
            v.resize(m, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_orthonormal() {
        let b = HoppingBasis::new(7);
        for k in 0..7 {
            for l in 0..7 {
                let d: f64 = (0..7).map(|i| b.phi[k * 7 + i] * b.phi[l * 7 + i]).sum();
                assert!((d - if k == l { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn eigenvectors_satisfy_the_recurrence() {
        let m = 9;
        let b = HoppingBasis::new(m);
        for k in 0..m {
            for i in 0..m {
                let left = if i > 0 { b.phi[k * m + i - 1] } else { 0.0 };
                let right = if i + 1 < m { b.phi[k * m + i + 1] } else { 0.0 };
                assert!((left + right - b.eigenvalues[k] * b.phi[k * m + i]).abs() < 1e-13);
            }
        }
    }
}
