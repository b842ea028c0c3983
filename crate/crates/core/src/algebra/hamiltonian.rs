//! Real polynomial Hamiltonians: a diagonal `Σ d_j |q_j|²` part plus sparse
//! higher terms, with an ℓ¹ bucket for discarded mass.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::index::{MultiIndex, SiteExponent};
use super::lattice::{LatticeBox, State};
use super::poly::Polynomial;
use super::AlgebraError;
use crate::disorder::DisorderRealization;

const RESIDUE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    lattice: LatticeBox,
    /// Coefficient of `|q_j|²` by box offset; the frequency is twice this.
    diagonal: Vec<f64>,
    terms: Polynomial<Complex64>,
    remainder_norm: f64,
}

/// A stored term breaking `|c(n)| < exp(-ρ (Δ(n) + |n| - 2) log(1/ε))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayViolation {
    pub index: String,
    pub magnitude: f64,
    pub bound: f64,
}

impl Hamiltonian {
    pub fn zero(lattice: LatticeBox) -> Self {
        Self {
            lattice,
            diagonal: vec![0.0; lattice.len()],
            terms: Polynomial::new(),
            remainder_norm: 0.0,
        }
    }

    pub fn from_parts(
        lattice: LatticeBox,
        diagonal: Vec<f64>,
        terms: Polynomial<Complex64>,
        remainder_norm: f64,
    ) -> Result<Self, AlgebraError> {
        if diagonal.len() != lattice.len() {
            return Err(AlgebraError::Format(format!(
                "diagonal has {} entries for a box of {} sites",
                diagonal.len(),
                lattice.len()
            )));
        }
        Ok(Self {
            lattice,
            diagonal,
            terms,
            remainder_norm,
        })
    }

    /// `½(Σ v_j|q_j|² + ε1 Σ (q̄_j q_{j+1} + q_j q̄_{j+1}) + ½ ε2 Σ |q_j|⁴)`.
    pub fn initial(v: &DisorderRealization, eps1: f64, eps2: f64) -> Result<Self, AlgebraError> {
        for (name, value) in [("eps1", eps1), ("eps2", eps2)] {
            if !(0.0..1.0).contains(&value) {
                return Err(AlgebraError::CouplingOutOfRange { name, value });
            }
        }
        let lattice = v.lattice();
        let mut h = Self::zero(lattice);
        for j in lattice.sites() {
            h.diagonal[lattice.offset(j).unwrap()] = 0.5 * v.tilde(j);
        }
        let hop = Complex64::new(0.5 * eps1, 0.0);
        let quartic = Complex64::new(0.25 * eps2, 0.0);
        for j in lattice.sites() {
            if j < lattice.max_site() {
                h.terms.add_term(MultiIndex::pair(j, j + 1), hop);
                h.terms.add_term(MultiIndex::pair(j + 1, j), hop);
            }
            h.terms.add_term(MultiIndex::single(j, 2, 2), quartic);
        }
        Ok(h)
    }

    /// Purely diagonal `Σ d_j |q_j|²`.
    pub fn diagonal_only(lattice: LatticeBox, d: impl Fn(i32) -> f64) -> Self {
        let mut h = Self::zero(lattice);
        for j in lattice.sites() {
            h.diagonal[lattice.offset(j).unwrap()] = d(j);
        }
        h
    }

    pub fn from_polynomial(lattice: LatticeBox, terms: Polynomial<Complex64>) -> Self {
        Self {
            lattice,
            diagonal: vec![0.0; lattice.len()],
            terms,
            remainder_norm: 0.0,
        }
    }

    pub fn lattice(&self) -> LatticeBox {
        self.lattice
    }

    pub fn terms(&self) -> &Polynomial<Complex64> {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut Polynomial<Complex64> {
        &mut self.terms
    }

    pub fn into_terms(self) -> Polynomial<Complex64> {
        self.terms
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Coefficient of `|q_j|²` (zero outside the box).
    pub fn diagonal_at(&self, j: i32) -> f64 {
        self.lattice.offset(j).map_or(0.0, |k| self.diagonal[k])
    }

    pub fn add_diagonal(&mut self, j: i32, delta: f64) {
        if let Some(k) = self.lattice.offset(j) {
            self.diagonal[k] += delta;
        }
    }

    /// `ṽ_j`, the frequency multiplying `q_j` in the equations of motion.
    pub fn frequency(&self, j: i32) -> f64 {
        2.0 * self.diagonal_at(j)
    }

    pub fn remainder_norm(&self) -> f64 {
        self.remainder_norm
    }

    pub fn add_remainder(&mut self, mass: f64) {
        self.remainder_norm += mass;
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.diagonal.iter().all(|&d| d == 0.0)
    }

    /// ℓ¹ mass of the non-diagonal terms.
    pub fn l1_norm(&self) -> f64 {
        self.terms.l1_norm()
    }

    /// `Ω(n) = Σ (n_j - n'_j) ṽ_j` against the current frequencies.
    pub fn divisor(&self, n: &MultiIndex) -> f64 {
        n.linear_form(|j| self.frequency(j))
    }

    /// `{D, P} = Σ d_j (n_j - n'_j) c(n) q^n q̄^{n'}` for the diagonal `D`.
    pub fn diagonal_bracket(&self, p: &Polynomial<Complex64>) -> Polynomial<Complex64> {
        let mut out = Polynomial::new();
        for (n, c) in p.iter() {
            let w = n.linear_form(|j| self.diagonal_at(j));
            if w != 0.0 {
                out.add_term(n.clone(), c * w);
            }
        }
        out
    }

    /// `{self, p}` for a polynomial without diagonal part.
    pub fn bracket_with(&self, p: &Polynomial<Complex64>) -> Polynomial<Complex64> {
        let mut out = self.diagonal_bracket(p);
        out.add_assign(&self.terms.bracket(p));
        out
    }

    /// `{self, other}` for two Hamiltonians on the same box. The result has
    /// no diagonal; resonant quadratics it produces stay among the terms.
    pub fn poisson_bracket(&self, other: &Self) -> Self {
        let mut out = self.bracket_with(&other.terms);
        out.sub_assign(&other.diagonal_bracket(&self.terms));
        Self::from_polynomial(self.lattice, out)
    }

    /// `Σ d_j|q_j|² + Σ c(n) q^n q̄^{n'}`; errors if the imaginary part is
    /// not roundoff.
    pub fn evaluate(&self, q: &State) -> Result<f64, AlgebraError> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (z, d) in q.as_slice().iter().zip(&self.diagonal) {
            let t = d * z.norm_sqr();
            total += t;
            scale += t.abs();
        }
        for (n, c) in self.terms.iter() {
            let m = monomial_value(n, q);
            let t = c * m;
            total += t;
            scale += t.norm();
        }
        let tolerance = RESIDUE_TOLERANCE * scale.max(self.terms.l1_norm());
        if total.im.abs() > tolerance {
            return Err(AlgebraError::RealityViolation {
                residue: total.im.abs(),
                tolerance,
            });
        }
        Ok(total.re)
    }

    /// `∂H/∂q̄_j` at every box site.
    pub fn conj_gradient(&self, q: &State) -> Vec<Complex64> {
        let mut g: Vec<Complex64> = q
            .as_slice()
            .iter()
            .zip(&self.diagonal)
            .map(|(z, d)| z * d)
            .collect();
        for (n, c) in self.terms.iter() {
            accumulate_conj_gradient(n, *c, q, &mut g);
        }
        g
    }

    /// `q̇_j = -2i ∂H/∂q̄_j`.
    pub fn vector_field(&self, q: &State) -> Vec<Complex64> {
        let minus_two_i = Complex64::new(0.0, -2.0);
        self.conj_gradient(q)
            .into_iter()
            .map(|g| g * minus_two_i)
            .collect()
    }

    pub fn weighted_norm_check(&self, rho: f64, eps: f64) -> Vec<DecayViolation> {
        let log_inv = (1.0 / eps).ln();
        let mut out: Vec<DecayViolation> = self
            .terms
            .sorted_terms()
            .into_iter()
            .filter_map(|(n, c)| {
                let order = n.diameter() as f64 + n.degree() as f64 - 2.0;
                let bound = (-rho * order * log_inv).exp();
                (c.norm() >= bound).then(|| DecayViolation {
                    index: n.to_string(),
                    magnitude: c.norm(),
                    bound,
                })
            })
            .collect();
        out.sort_by(|a, b| a.index.cmp(&b.index));
        out
    }

    /// Largest `ρ` with `|c(n)| < ε^{ρ(Δ(n)+|n|-2)}` for every stored term of
    /// positive order, with the term that limits it.
    pub fn effective_decay_rate(&self, eps: f64) -> Option<(f64, MultiIndex)> {
        let log_inv = (1.0 / eps).ln();
        self.terms
            .iter()
            .filter_map(|(n, c)| {
                let order = n.diameter() as f64 + n.degree() as f64 - 2.0;
                (order > 0.0 && c.norm() > 0.0).then(|| (-c.norm().ln() / (order * log_inv), n))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)))
            .map(|(r, n)| (r, n.clone()))
    }

    /// Drop terms with `|c| < floor`, `Δ > diameter_cap` or `|n| > degree_cap`;
    /// the dropped ℓ¹ mass is added to the remainder and returned.
    pub fn prune(&self, floor: f64, diameter_cap: u32, degree_cap: u32) -> (Self, f64) {
        self.prune_where(|n, c| {
            c.norm() >= floor && n.diameter() <= diameter_cap && n.degree() <= degree_cap
        })
    }

    /// Keep the terms accepted by `keep`, moving the rest into the remainder.
    pub fn prune_where(&self, mut keep: impl FnMut(&MultiIndex, &Complex64) -> bool) -> (Self, f64) {
        let mut out = self.clone();
        let mut dropped = 0.0;
        out.terms.retain(|n, c| {
            let k = keep(n, c);
            if !k {
                dropped += c.norm();
            }
            k
        });
        out.remainder_norm += dropped;
        (out, dropped)
    }

    /// Largest `|c(n̄) - conj c(n)|` over stored terms.
    pub fn reality_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(n, c)| (self.terms.coefficient(&n.conjugate()) - c.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Replace each coefficient pair by its Hermitian part.
    pub fn symmetrize(&mut self) {
        self.terms = hermitian_part(&self.terms);
    }

    pub fn is_gauge_balanced(&self) -> bool {
        self.terms.iter().all(|(n, _)| n.is_gauge_balanced())
    }

    pub fn to_json(&self) -> HamiltonianJson {
        let terms = self
            .terms
            .sorted_terms()
            .into_iter()
            .map(|(n, c)| TermJson {
                sites: n.entries().iter().map(|e| e.site).collect(),
                n: n.entries().iter().map(|e| e.n).collect(),
                nprime: n.entries().iter().map(|e| e.nc).collect(),
                re: c.re,
                im: c.im,
            })
            .collect();
        HamiltonianJson {
            half_width: self.lattice.half_width(),
            diagonal: self.diagonal.clone(),
            terms,
            remainder_norm: self.remainder_norm,
        }
    }

    pub fn from_json(j: &HamiltonianJson) -> Result<Self, AlgebraError> {
        let lattice = LatticeBox::new(j.half_width)?;
        let mut terms = Polynomial::new();
        for t in &j.terms {
            if t.sites.len() != t.n.len() || t.sites.len() != t.nprime.len() {
                return Err(AlgebraError::Format("ragged term arrays".into()));
            }
            let n = MultiIndex::canonicalize(
                t.sites
                    .iter()
                    .zip(&t.n)
                    .zip(&t.nprime)
                    .map(|((&s, &a), &b)| (s as i64, a as i64, b as i64)),
            )?;
            if !n.is_gauge_balanced() {
                return Err(AlgebraError::Format(format!("term {n} is not gauge balanced")));
            }
            terms.add_term(n, Complex64::new(t.re, t.im));
        }
        let h = Self::from_parts(lattice, j.diagonal.clone(), terms, j.remainder_norm)?;
        let defect = h.reality_defect();
        if defect > RESIDUE_TOLERANCE * h.l1_norm().max(1.0) {
            return Err(AlgebraError::RealityViolation {
                residue: defect,
                tolerance: RESIDUE_TOLERANCE,
            });
        }
        Ok(h)
    }
}

/// `(P + P̃)/2` where `P̃` has coefficients `conj c(n̄)`.
pub fn hermitian_part(p: &Polynomial<Complex64>) -> Polynomial<Complex64> {
    let mut out = Polynomial::new();
    for (n, c) in p.iter() {
        out.add_term(n.clone(), c * 0.5);
        out.add_term(n.conjugate(), c.conj() * 0.5);
    }
    out
}

#[inline]
fn site_power(z: Complex64, n: u16, nc: u16) -> Complex64 {
    let common = n.min(nc);
    let mut out = Complex64::new(z.norm_sqr().powi(common as i32), 0.0);
    let (base, extra) = if n > nc { (z, n - nc) } else { (z.conj(), nc - n) };
    for _ in 0..extra {
        out *= base;
    }
    out
}

/// `∂P/∂q̄_j` at every box site for a polynomial without diagonal part.
pub fn polynomial_conj_gradient(p: &Polynomial<Complex64>, q: &State) -> Vec<Complex64> {
    let mut g = vec![Complex64::new(0.0, 0.0); q.as_slice().len()];
    for (n, c) in p.iter() {
        accumulate_conj_gradient(n, *c, q, &mut g);
    }
    g
}

pub fn monomial_value(n: &MultiIndex, q: &State) -> Complex64 {
    let mut m = Complex64::new(1.0, 0.0);
    for e in n.entries() {
        m *= site_power(q.get(e.site), e.n, e.nc);
    }
    m
}

fn accumulate_conj_gradient(n: &MultiIndex, c: Complex64, q: &State, g: &mut [Complex64]) {
    let entries: &[SiteExponent] = n.entries();
    let lattice = q.lattice();
    if entries.iter().any(|e| !lattice.contains(e.site)) {
        return;
    }
    let factors: smallvec::SmallVec<[Complex64; 6]> =
        entries.iter().map(|e| site_power(q.get(e.site), e.n, e.nc)).collect();
    for (k, e) in entries.iter().enumerate() {
        if e.nc == 0 {
            continue;
        }
        let mut d = c * e.nc as f64 * site_power(q.get(e.site), e.n, e.nc - 1);
        for (i, f) in factors.iter().enumerate() {
            if i != k {
                d *= f;
            }
        }
        g[lattice.offset(e.site).unwrap()] += d;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub sites: Vec<i32>,
    pub n: Vec<u16>,
    pub nprime: Vec<u16>,
    pub re: f64,
    pub im: f64,
}

/// On-disk form: terms sorted by index, diagonal listed from site `-L` to `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub half_width: u32,
    pub diagonal: Vec<f64>,
    pub terms: Vec<TermJson>,
    pub remainder_norm: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn realization(l: u32, seed: u64) -> DisorderRealization {
        DisorderRealization::sample(seed, LatticeBox::new(l).unwrap())
    }

    #[test]
    fn hermitian_part_adds_missing_partners() {
        let mut p = Polynomial::new();
        p.add_term(MultiIndex::pair(1, 2), Complex64::new(0.4, 0.2));
        let h = hermitian_part(&p);
        assert_eq!(h.coefficient(&MultiIndex::pair(1, 2)), Complex64::new(0.2, 0.1));
        assert_eq!(h.coefficient(&MultiIndex::pair(2, 1)), Complex64::new(0.2, -0.1));
    }

    #[test]
    fn initial_coefficients() {
        let v = realization(6, 1);
        let h = Hamiltonian::initial(&v, 0.02, 0.03).unwrap();
        assert_eq!(h.terms().coefficient(&MultiIndex::single(2, 2, 2)), Complex64::new(0.0075, 0.0));
        assert_eq!(h.terms().coefficient(&MultiIndex::pair(2, 3)), Complex64::new(0.01, 0.0));
        assert_eq!(h.terms().coefficient(&MultiIndex::pair(3, 2)), Complex64::new(0.01, 0.0));
        assert_eq!(h.frequency(4), v.tilde(4));
        assert_eq!(h.reality_defect(), 0.0);
        assert!(h.is_gauge_balanced());
    }

    #[test]
    fn uncoupled_is_diagonal() {
        let h = Hamiltonian::initial(&realization(4, 2), 0.0, 0.0).unwrap();
        assert!(h.terms().is_empty());
    }

    #[test]
    fn rejects_coupling_out_of_range() {
        assert!(Hamiltonian::initial(&realization(4, 2), 1.5, 0.0).is_err());
    }

    #[test]
    fn evaluate_single_site() {
        let lattice = LatticeBox::new(2).unwrap();
        let h = Hamiltonian::diagonal_only(lattice, |j| if j == 0 { 0.5 * 0.7 } else { 0.0 });
        let q = State::from_fn(lattice, |j| if j == 0 { Complex64::new(1.0, 1.0) } else { Complex64::new(0.0, 0.0) });
        assert!((h.evaluate(&q).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(h.evaluate(&State::zeros(lattice)).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_flags_complex_value() {
        let lattice = LatticeBox::new(2).unwrap();
        let mut p = Polynomial::new();
        p.add_term(MultiIndex::pair(0, 1), Complex64::new(1.0, 0.0));
        let h = Hamiltonian::from_polynomial(lattice, p);
        let q = State::from_fn(lattice, |j| Complex64::new(1.0, j as f64));
        assert!(matches!(h.evaluate(&q), Err(AlgebraError::RealityViolation { .. })));
    }

    #[test]
    fn prune_accounts_mass() {
        let h = Hamiltonian::initial(&realization(5, 3), 0.02, 0.04).unwrap();
        let (kept, dropped) = h.prune(0.005, 100, 100);
        assert!((kept.l1_norm() + dropped - h.l1_norm()).abs() < 1e-14);
        assert_eq!(kept.remainder_norm(), dropped);
        let (same, none) = h.prune(0.0, u32::MAX, u32::MAX);
        assert_eq!(none, 0.0);
        assert_eq!(same, h);
    }

    #[test]
    fn weighted_norm_flags_large_term() {
        let lattice = LatticeBox::new(4).unwrap();
        let n = MultiIndex::canonicalize([(0, 1, 0), (1, 1, 0), (2, 0, 2)]).unwrap();
        let mut p = Polynomial::new();
        p.add_term(n.clone(), Complex64::new(1.0, 0.0));
        p.add_term(n.conjugate(), Complex64::new(1.0, 0.0));
        let h = Hamiltonian::from_polynomial(lattice, p);
        assert_eq!(h.weighted_norm_check(0.5, 0.05).len(), 2);
        assert!(Hamiltonian::zero(lattice).weighted_norm_check(0.5, 0.05).is_empty());
    }

    #[test]
    fn json_round_trip() {
        let h = Hamiltonian::initial(&realization(3, 4), 0.01, 0.02).unwrap();
        let text = serde_json::to_string(&h.to_json()).unwrap();
        let back: HamiltonianJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Hamiltonian::from_json(&back).unwrap(), h);
    }
}
