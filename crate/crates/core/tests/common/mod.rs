#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use proptest::prelude::*;
use serde::Deserialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dnls_core::algebra::{hamiltonian::hermitian_part, ExactComplex, Hamiltonian, LatticeBox, MultiIndex, Polynomial, SiteExponent, State};
use dnls_core::harness::ExperimentConfig;

#[derive(Debug, Deserialize)]
pub struct FixtureSeed {
    pub seed: u64,
    pub j0: i64,
}

#[derive(Debug, Deserialize)]
pub struct FixtureSet {
    pub eps: f64,
    pub searched: String,
    pub accepted: Vec<FixtureSeed>,
}

#[derive(Debug, Deserialize)]
pub struct Fixtures {
    #[serde(rename = "A")]
    pub order: f64,
    #[serde(rename = "N")]
    pub n: i64,
    pub jbar0: i64,
    #[serde(rename = "L")]
    pub half_width: u32,
    pub sets: Vec<FixtureSet>,
}

pub fn fixtures() -> Fixtures {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/accepted_seeds.json");
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

impl Fixtures {
    pub fn set(&self, eps: f64) -> &FixtureSet {
        self.sets.iter().find(|s| (s.eps - eps).abs() < 1e-12).unwrap()
    }

    /// Config of the fixture experiment at `ε` with the default split.
    pub fn config(&self, eps: f64, seeds: Vec<u64>) -> ExperimentConfig {
        ExperimentConfig {
            eps1: eps / 2.0,
            eps2: eps / 2.0,
            order: self.order,
            n: Some(self.n),
            jbar0: self.jbar0,
            half_width: self.half_width,
            seeds: dnls_core::harness::SeedSpec::List(seeds),
            ..ExperimentConfig::default()
        }
    }
}

/// Right side of `q̇_j = -i (v_j q_j + ε1 (q_{j-1} + q_{j+1}) + ε2 |q_j|² q_j)`
/// with zero boundary, written out directly.
pub fn lattice_rhs(q: &State, v: &[f64], eps1: f64, eps2: f64) -> Vec<Complex64> {
    let a = q.as_slice();
    let m = a.len();
    (0..m)
        .map(|k| {
            let left = if k > 0 { a[k - 1] } else { Complex64::new(0.0, 0.0) };
            let right = if k + 1 < m { a[k + 1] } else { Complex64::new(0.0, 0.0) };
            let rhs = a[k] * v[k] + (left + right) * eps1 + a[k] * (eps2 * a[k].norm_sqr());
            Complex64::new(0.0, -1.0) * rhs
        })
        .collect()
}

/// Random real Hamiltonian of gauge-balanced monomials of degree ≤ 6 on
/// `[lo, hi]`, with `resonant` choosing `n = n'` at every site.
pub fn random_hamiltonian(lattice: LatticeBox, lo: i32, hi: i32, terms: usize, resonant: bool, seed: u64) -> Hamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Polynomial::new();
    while p.len() < terms {
        let k = rng.random_range(1..=3usize);
        let mut sites: Vec<i32> = (0..k).map(|_| rng.random_range(lo..=hi)).collect();
        sites.sort();
        sites.dedup();
        let entries: Vec<SiteExponent> = if resonant {
            sites.iter().map(|&s| { let a = rng.random_range(1..=2u16); SiteExponent::new(s, a, a) }).collect()
        } else {
            // one q and one q̄ somewhere, plus resonant padding
            let mut e: Vec<SiteExponent> = sites.iter().map(|&s| SiteExponent::new(s, 0, 0)).collect();
            let (a, b) = (rng.random_range(0..e.len()), rng.random_range(0..e.len()));
            e[a].n += 1;
            e[b].nc += 1;
            for x in e.iter_mut() {
                let pad = rng.random_range(0..=1u16);
                x.n += pad;
                x.nc += pad;
            }
            e.into_iter().filter(|x| x.n + x.nc > 0).collect()
        };
        let n = MultiIndex::from_sorted(entries);
        let c = Complex64::new(rng.random_range(-0.3..0.3), if resonant { 0.0 } else { rng.random_range(-0.3..0.3) });
        p.add_term(n, c);
    }
    let mut h = Hamiltonian::from_polynomial(lattice, hermitian_part(&p));
    for j in lattice.sites() {
        h.add_diagonal(j, rng.random_range(0.0..0.5));
    }
    h
}

pub fn random_state(lattice: LatticeBox, seed: u64, scale: f64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    State::from_fn(lattice, |_| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
}

/// Monomials on sites `-3..=3` with exponents up to 2 per site.
pub fn monomial() -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec((-3i32..=3, 0u16..=2, 0u16..=2), 1..=3).prop_map(|raw| {
        let mut entries: Vec<SiteExponent> = Vec::new();
        for (s, n, nc) in raw {
            if n + nc == 0 || entries.iter().any(|e| e.site == s) {
                continue;
            }
            entries.push(SiteExponent::new(s, n, nc));
        }
        if entries.is_empty() {
            entries.push(SiteExponent::new(0, 1, 0));
        }
        entries.sort();
        MultiIndex::from_sorted(entries)
    })
}

pub fn gauge_monomial() -> impl Strategy<Value = MultiIndex> {
    monomial().prop_filter("gauge balanced", |m| m.is_gauge_balanced())
}

pub fn exact_coeff() -> impl Strategy<Value = ExactComplex> {
    (-9i64..=9, 1i64..=5, -9i64..=9, 1i64..=5)
        .prop_filter("nonzero", |(a, _, c, _)| *a != 0 || *c != 0)
        .prop_map(|(a, b, c, d)| dnls_core::algebra::coeff::exact(a, b, c, d))
}

pub fn exact_term() -> impl Strategy<Value = Polynomial<ExactComplex>> {
    (monomial(), exact_coeff()).prop_map(|(m, c)| Polynomial::monomial(m, c))
}
