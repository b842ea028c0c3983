//! Exponent multi-indices naming monomials `∏ q_j^{n_j} q̄_j^{n'_j}`.

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::AlgebraError;

/// Exponents of `q_j` and `q̄_j` at a single lattice site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteExponent {
    pub site: i32,
    /// Power of `q_j`.
    pub n: u16,
    /// Power of `q̄_j`.
    pub nc: u16,
}

impl SiteExponent {
    pub fn new(site: i32, n: u16, nc: u16) -> Self {
        Self { site, n, nc }
    }

    /// `n_j - n'_j`.
    #[inline]
    pub fn imbalance(&self) -> i32 {
        self.n as i32 - self.nc as i32
    }
}

/// A finitely supported exponent map in canonical form: sites strictly
/// increasing, no `(0, 0)` entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct MultiIndex(SmallVec<[SiteExponent; 4]>);

impl MultiIndex {
    /// The empty index (the constant monomial).
    pub fn empty() -> Self {
        Self(SmallVec::new())
    }

    /// Merge duplicates, drop zero entries and sort by site.
    pub fn canonicalize<I>(raw: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (i64, i64, i64)>,
    {
        let mut entries: Vec<(i64, i64, i64)> = Vec::new();
        for (site, n, nc) in raw {
            if n < 0 || nc < 0 {
                return Err(AlgebraError::NegativeExponent { site, n, nc });
            }
            entries.push((site, n, nc));
        }
        entries.sort_by_key(|e| e.0);
        let mut out: SmallVec<[SiteExponent; 4]> = SmallVec::new();
        for (site, n, nc) in entries {
            let site = i32::try_from(site).map_err(|_| AlgebraError::SiteOutOfRange(site))?;
            match out.last_mut() {
                Some(last) if last.site == site => {
                    last.n = add_exponent(last.n, n)?;
                    last.nc = add_exponent(last.nc, nc)?;
                }
                _ => out.push(SiteExponent {
                    site,
                    n: add_exponent(0, n)?,
                    nc: add_exponent(0, nc)?,
                }),
            }
        }
        out.retain(|e| e.n != 0 || e.nc != 0);
        Ok(Self(out))
    }

    /// Build from entries already in canonical order. Debug builds check the
    /// ordering.
    pub fn from_sorted(entries: impl IntoIterator<Item = SiteExponent>) -> Self {
        let v: SmallVec<[SiteExponent; 4]> = entries
            .into_iter()
            .filter(|e| e.n != 0 || e.nc != 0)
            .collect();
        debug_assert!(v.windows(2).all(|w| w[0].site < w[1].site));
        Self(v)
    }

    /// `q_j^n q̄_j^nc` at one site.
    pub fn single(site: i32, n: u16, nc: u16) -> Self {
        Self::from_sorted([SiteExponent::new(site, n, nc)])
    }

    /// `q_a q̄_b`, the hopping-type quadratic index.
    pub fn pair(a: i32, b: i32) -> Self {
        if a == b {
            return Self::single(a, 1, 1);
        }
        let (x, y) = (SiteExponent::new(a, 1, 0), SiteExponent::new(b, 0, 1));
        if a < b {
            Self::from_sorted([x, y])
        } else {
            Self::from_sorted([y, x])
        }
    }

    pub fn entries(&self) -> &[SiteExponent] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn support(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.iter().map(|e| e.site)
    }

    pub fn min_site(&self) -> Option<i32> {
        self.0.first().map(|e| e.site)
    }

    pub fn max_site(&self) -> Option<i32> {
        self.0.last().map(|e| e.site)
    }

    /// Diameter of the support, zero for empty or single-site indices.
    pub fn diameter(&self) -> u32 {
        match (self.0.first(), self.0.last()) {
            (Some(a), Some(b)) => (b.site - a.site) as u32,
            _ => 0,
        }
    }

    /// Total degree `Σ (n_j + n'_j)`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|e| e.n as u32 + e.nc as u32).sum()
    }

    /// `n_j = n'_j` at every site of the support.
    pub fn is_resonant(&self) -> bool {
        self.0.iter().all(|e| e.n == e.nc)
    }

    /// `Σ n_j = Σ n'_j`.
    pub fn is_gauge_balanced(&self) -> bool {
        self.0.iter().map(SiteExponent::imbalance).sum::<i32>() == 0
    }

    /// A resonant quadratic `|q_j|^2` returns its site.
    pub fn resonant_quadratic_site(&self) -> Option<i32> {
        match self.0.as_slice() {
            [e] if e.n == 1 && e.nc == 1 => Some(e.site),
            _ => None,
        }
    }

    /// Swap `n_j ↔ n'_j` at every site.
    pub fn conjugate(&self) -> Self {
        Self(
            self.0
                .iter()
                .map(|e| SiteExponent::new(e.site, e.nc, e.n))
                .collect(),
        )
    }

    /// Whether this index or its conjugate is the canonical representative of
    /// the pair `{n, n̄}` (the smaller of the two in lexicographic order).
    pub fn is_pair_representative(&self) -> bool {
        let c = self.conjugate();
        *self <= c
    }

    /// The representative of `{n, n̄}`.
    pub fn pair_representative(&self) -> Self {
        let c = self.conjugate();
        if *self <= c {
            self.clone()
        } else {
            c
        }
    }

    pub fn exponent_at(&self, site: i32) -> Option<SiteExponent> {
        self.0
            .binary_search_by_key(&site, |e| e.site)
            .ok()
            .map(|i| self.0[i])
    }

    /// Largest site with `n_j ≠ n'_j`.
    pub fn j_plus(&self) -> Option<i32> {
        self.0.iter().rev().find(|e| e.n != e.nc).map(|e| e.site)
    }

    /// `Σ (n_j - n'_j) f(j)` over the support.
    pub fn linear_form(&self, mut f: impl FnMut(i32) -> f64) -> f64 {
        self.0
            .iter()
            .filter(|e| e.n != e.nc)
            .map(|e| e.imbalance() as f64 * f(e.site))
            .sum()
    }

    pub fn meets(&self, lo: i32, hi: i32) -> bool {
        self.0.iter().any(|e| e.site >= lo && e.site <= hi)
    }

    pub fn within(&self, lo: i32, hi: i32) -> bool {
        self.0.iter().all(|e| e.site >= lo && e.site <= hi)
    }

    /// Component-wise sum of two indices.
    pub fn merge(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[SiteExponent; 4]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut k) = (0, 0);
        while i < a.len() && k < b.len() {
            let (x, y) = (a[i], b[k]);
            match x.site.cmp(&y.site) {
                std::cmp::Ordering::Less => {
                    out.push(x);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(y);
                    k += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(SiteExponent::new(x.site, x.n + y.n, x.nc + y.nc));
                    i += 1;
                    k += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[k..]);
        Self(out)
    }

    /// Lower both exponents at `site` by one, removing the entry when it
    /// becomes zero. The caller guarantees both exponents are positive.
    pub(crate) fn lower_pair_at(&self, site: i32) -> Self {
        let mut out = self.0.clone();
        let pos = out
            .binary_search_by_key(&site, |e| e.site)
            .expect("site in support");
        let e = &mut out[pos];
        debug_assert!(e.n > 0 && e.nc > 0);
        e.n -= 1;
        e.nc -= 1;
        if e.n == 0 && e.nc == 0 {
            out.remove(pos);
        }
        Self(out)
    }
}

fn add_exponent(a: u16, b: i64) -> Result<u16, AlgebraError> {
    u16::try_from(a as i64 + b).map_err(|_| AlgebraError::ExponentOverflow)
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}:{},{}", e.site, e.n, e.nc)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
