use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Sites `-L..=L`; amplitudes outside are identically zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeBox {
    half_width: u32,
}

impl LatticeBox {
    pub fn new(half_width: u32) -> Result<Self, AlgebraError> {
        if half_width == 0 {
            return Err(AlgebraError::BoxTooSmall {
                half_width,
                required: 1,
            });
        }
        Ok(Self { half_width })
    }

    /// A box large enough for monomials of diameter/degree up to `20A` around
    /// `±(j0 ± N)`.
    pub fn for_experiment(half_width: u32, j0: u32, n: u32, a: f64) -> Result<Self, AlgebraError> {
        let required = Self::required_half_width(j0, n, a);
        if half_width < required {
            return Err(AlgebraError::BoxTooSmall {
                half_width,
                required,
            });
        }
        Self::new(half_width)
    }

    pub fn required_half_width(j0: u32, n: u32, a: f64) -> u32 {
        j0 + n + (20.0 * a).ceil() as u32 + 2
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        2 * self.half_width as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_site(&self) -> i32 {
        -(self.half_width as i32)
    }

    pub fn max_site(&self) -> i32 {
        self.half_width as i32
    }

    pub fn sites(&self) -> std::ops::RangeInclusive<i32> {
        self.min_site()..=self.max_site()
    }

    pub fn contains(&self, j: i32) -> bool {
        j.unsigned_abs() <= self.half_width
    }

    /// Position of site `j` in a site-ordered vector.
    #[inline]
    pub fn offset(&self, j: i32) -> Option<usize> {
        self.contains(j)
            .then(|| (j + self.half_width as i32) as usize)
    }

    #[inline]
    pub fn site_at(&self, offset: usize) -> i32 {
        offset as i32 - self.half_width as i32
    }
}

/// Complex amplitudes on a lattice box.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    lattice: LatticeBox,
    amps: Vec<Complex64>,
}

impl State {
    pub fn zeros(lattice: LatticeBox) -> Self {
        Self {
            lattice,
            amps: vec![Complex64::new(0.0, 0.0); lattice.len()],
        }
    }

    pub fn from_fn(lattice: LatticeBox, mut f: impl FnMut(i32) -> Complex64) -> Self {
        let amps = lattice.sites().map(&mut f).collect();
        Self { lattice, amps }
    }

    pub fn from_vec(lattice: LatticeBox, amps: Vec<Complex64>) -> Result<Self, AlgebraError> {
        if amps.len() != lattice.len() {
            return Err(AlgebraError::Format(format!(
                "expected {} amplitudes, got {}",
                lattice.len(),
                amps.len()
            )));
        }
        Ok(Self { lattice, amps })
    }

    pub fn lattice(&self) -> LatticeBox {
        self.lattice
    }

    /// Amplitude at `j`, zero outside the box.
    #[inline]
    pub fn get(&self, j: i32) -> Complex64 {
        self.lattice
            .offset(j)
            .map_or(Complex64::new(0.0, 0.0), |k| self.amps[k])
    }

    pub fn set(&mut self, j: i32, z: Complex64) {
        if let Some(k) = self.lattice.offset(j) {
            self.amps[k] = z;
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.amps {
            *z *= s;
        }
    }

    /// `Σ_{|j| > cut} |q_j|²`.
    pub fn tail_mass(&self, cut: i32) -> f64 {
        self.lattice
            .sites()
            .zip(&self.amps)
            .filter(|(j, _)| j.abs() > cut)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_round_trip() {
        let b = LatticeBox::new(3).unwrap();
        assert_eq!(b.len(), 7);
        for j in b.sites() {
            assert_eq!(b.site_at(b.offset(j).unwrap()), j);
        }
        assert_eq!(b.offset(4), None);
        assert_eq!(b.offset(-4), None);
    }

    #[test]
    fn experiment_box_margin() {
        assert_eq!(LatticeBox::required_half_width(64, 32, 2.0), 138);
        assert!(LatticeBox::for_experiment(137, 64, 32, 2.0).is_err());
        assert!(LatticeBox::for_experiment(138, 64, 32, 2.0).is_ok());
    }

    #[test]
    fn outside_reads_zero() {
        let b = LatticeBox::new(2).unwrap();
        let s = State::from_fn(b, |j| Complex64::new(j as f64, 0.0));
        assert_eq!(s.get(5), Complex64::new(0.0, 0.0));
        assert_eq!(s.get(-2), Complex64::new(-2.0, 0.0));
        assert_eq!(s.tail_mass(1), 8.0);
    }
}
