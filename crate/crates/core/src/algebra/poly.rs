//! Sparse polynomials in `(q_j, q̄_j)` over a generic coefficient ring.

use std::collections::HashMap;

use rustc_hash::{FxBuildHasher, FxHashMap};

use super::coeff::Coefficient;
use super::index::{MultiIndex, SiteExponent};

pub type TermMap<C> = HashMap<MultiIndex, C, FxBuildHasher>;

/// `Σ c(n) ∏ q_j^{n_j} q̄_j^{n'_j}` with like terms combined and no zero
/// coefficients stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C> {
    terms: TermMap<C>,
}

impl<C> Default for Polynomial<C> {
    fn default() -> Self {
        Self {
            terms: TermMap::default(),
        }
    }
}

impl<C: Coefficient> Polynomial<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, C)>) -> Self {
        let mut p = Self::new();
        for (n, c) in terms {
            p.add_term(n, c);
        }
        p
    }

    pub fn monomial(n: MultiIndex, c: C) -> Self {
        Self::from_terms([(n, c)])
    }

    /// Add `c` to the coefficient of `n`, dropping the entry if it cancels.
    pub fn add_term(&mut self, n: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(n) {
            Entry::Occupied(mut o) => {
                let v = o.get().clone() + c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Overwrite the coefficient of `n` (removing it when zero).
    pub fn set(&mut self, n: MultiIndex, c: C) {
        if c.is_zero() {
            self.terms.remove(&n);
        } else {
            self.terms.insert(n, c);
        }
    }

    pub fn remove(&mut self, n: &MultiIndex) -> Option<C> {
        self.terms.remove(n)
    }

    pub fn get(&self, n: &MultiIndex) -> Option<&C> {
        self.terms.get(n)
    }

    pub fn coefficient(&self, n: &MultiIndex) -> C {
        self.terms.get(n).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    /// Terms ordered by index, for stable output.
    pub fn sorted_terms(&self) -> Vec<(&MultiIndex, &C)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn retain(&mut self, f: impl FnMut(&MultiIndex, &mut C) -> bool) {
        self.terms.retain(f);
    }

    pub fn into_terms(self) -> TermMap<C> {
        self.terms
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::new();
        for (n, c) in &self.terms {
            out.add_term(n.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (n, c) in &other.terms {
            self.add_term(n.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (n, c) in &other.terms {
            self.add_term(n.clone(), -c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-C::one()))
    }

    /// `Σ |c(n)|`.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(Coefficient::magnitude).sum()
    }

    /// Exact check of `c(n̄) = conj c(n)` for every stored `n`.
    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|(n, c)| self.coefficient(&n.conjugate()) == c.conjugate())
    }

    /// Exact check of `c(n̄) = -conj c(n)` for every stored `n`.
    pub fn is_anti_real(&self) -> bool {
        self.terms
            .iter()
            .all(|(n, c)| self.coefficient(&n.conjugate()) == -c.conjugate())
    }

    /// Poisson bracket `{self, other} = Σ_j ∂self/∂q̄_j ∂other/∂q_j - ∂self/∂q_j ∂other/∂q̄_j`.
    pub fn bracket(&self, other: &Self) -> Self {
        poisson_bracket(self, other)
    }
}

/// Bracket of two monomials. Calls `emit(index, prefactor)` once per shared
/// site `k` with nonzero prefactor `m'_k n_k - m_k n'_k`; the emitted index is
/// `m + n` with one `q_k q̄_k` pair removed.
pub fn bracket_monomials(m: &MultiIndex, n: &MultiIndex, mut emit: impl FnMut(MultiIndex, i64)) {
    let (a, b) = (m.entries(), n.entries());
    let mut shared: smallvec::SmallVec<[(i32, i64); 4]> = smallvec::SmallVec::new();
    let (mut i, mut k) = (0, 0);
    while i < a.len() && k < b.len() {
        let (x, y): (SiteExponent, SiteExponent) = (a[i], b[k]);
        match x.site.cmp(&y.site) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => k += 1,
            std::cmp::Ordering::Equal => {
                let p = x.nc as i64 * y.n as i64 - x.n as i64 * y.nc as i64;
                if p != 0 {
                    shared.push((x.site, p));
                }
                i += 1;
                k += 1;
            }
        }
    }
    if shared.is_empty() {
        return;
    }
    let merged = m.merge(n);
    for (site, p) in shared {
        emit(merged.lower_pair_at(site), p);
    }
}

/// Site → positions of the terms whose support contains it.
pub(crate) fn site_lookup<'a, C>(terms: &[(&'a MultiIndex, &'a C)]) -> FxHashMap<i32, Vec<u32>> {
    let mut by_site: FxHashMap<i32, Vec<u32>> = FxHashMap::default();
    for (pos, (n, _)) in terms.iter().enumerate() {
        for s in n.support() {
            by_site.entry(s).or_default().push(pos as u32);
        }
    }
    by_site
}

pub fn poisson_bracket<C: Coefficient>(a: &Polynomial<C>, b: &Polynomial<C>) -> Polynomial<C> {
    let b_terms: Vec<(&MultiIndex, &C)> = b.terms.iter().collect();
    let by_site = site_lookup(&b_terms);
    let mut out: Polynomial<C> = Polynomial::new();
    let mut candidates: Vec<u32> = Vec::new();
    for (m, cm) in &a.terms {
        candidates.clear();
        for s in m.support() {
            if let Some(list) = by_site.get(&s) {
                candidates.extend_from_slice(list);
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for &pos in &candidates {
            let (n, cn) = b_terms[pos as usize];
            let prod = cm.clone() * cn.clone();
            bracket_monomials(m, n, |idx, p| {
                out.add_term(idx, prod.clone() * C::from_int(p));
            });
        }
    }
    out
}
