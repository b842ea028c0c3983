use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, LatticeBox};

/// Random on-site potential `v_j ∈ [0, 1]` and its frequency shift `w_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    lattice: LatticeBox,
    seed: u64,
    v: Vec<f64>,
    w: Vec<f64>,
}

/// The value at site `j` for `seed`; the stream position depends only on `j`,
/// so any box containing `j` sees the same number.
pub fn site_value(seed: u64, j: i32) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    site_value_from(&mut rng, j)
}

fn site_value_from(rng: &mut ChaCha8Rng, j: i32) -> f64 {
    // zigzag so negative sites get their own positions; two words per draw
    let z = ((j as i64) << 1) ^ ((j as i64) >> 63);
    rng.set_word_pos(2 * z as u128);
    rng.random::<f64>()
}

impl DisorderRealization {
    pub fn sample(seed: u64, lattice: LatticeBox) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = lattice.sites().map(|j| site_value_from(&mut rng, j)).collect();
        Self {
            lattice,
            seed,
            v,
            w: vec![0.0; lattice.len()],
        }
    }

    /// Explicit potential listed from site `-L` to `L`.
    pub fn from_values(lattice: LatticeBox, v: Vec<f64>) -> Result<Self, AlgebraError> {
        if v.len() != lattice.len() {
            return Err(AlgebraError::Format(format!(
                "potential has {} values for a box of {} sites",
                v.len(),
                lattice.len()
            )));
        }
        if let Some(k) = v.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(AlgebraError::Format(format!(
                "potential value {} at site {} is outside [0, 1]",
                v[k],
                lattice.site_at(k)
            )));
        }
        Ok(Self {
            lattice,
            seed: 0,
            v,
            w: vec![0.0; lattice.len()],
        })
    }

    pub fn lattice(&self) -> LatticeBox {
        self.lattice
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn v(&self, j: i32) -> f64 {
        self.lattice.offset(j).map_or(0.0, |k| self.v[k])
    }

    pub fn w(&self, j: i32) -> f64 {
        self.lattice.offset(j).map_or(0.0, |k| self.w[k])
    }

    /// `ṽ_j = v_j + w_j`.
    pub fn tilde(&self, j: i32) -> f64 {
        self.lattice.offset(j).map_or(0.0, |k| self.v[k] + self.w[k])
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn shifts(&self) -> &[f64] {
        &self.w
    }

    /// Overwrite `v_j` (used by finite-difference probes; may leave `[0, 1]`).
    pub fn with_v(&self, j: i32, value: f64) -> Self {
        let mut out = self.clone();
        if let Some(k) = self.lattice.offset(j) {
            out.v[k] = value;
        }
        out
    }

    pub fn set_shifts(&mut self, w: Vec<f64>) {
        assert_eq!(w.len(), self.lattice.len());
        self.w = w;
    }

    pub fn add_shift(&mut self, j: i32, dw: f64) {
        if let Some(k) = self.lattice.offset(j) {
            self.w[k] += dw;
        }
    }

    /// Copy of the potential with `w` cleared.
    pub fn unmodulated(&self) -> Self {
        Self {
            w: vec![0.0; self.lattice.len()],
            ..self.clone()
        }
    }

    /// Replace `v` on `sites` by the values of `other` (same box).
    pub fn splice(&self, other: &Self, sites: impl IntoIterator<Item = i32>) -> Self {
        let mut out = self.clone();
        for j in sites {
            if let (Some(k), Some(m)) = (self.lattice.offset(j), other.lattice.offset(j)) {
                out.v[k] = other.v[m];
            }
        }
        out
    }
}
