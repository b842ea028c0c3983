mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::*;
use dnls_core::algebra::{
    coeff::exact, polynomial_conj_gradient, Hamiltonian, LatticeBox, MultiIndex, Polynomial, State,
};
use dnls_core::disorder::DisorderRealization;

/// `∂P/∂q_j` from the conjugate polynomial: `conj(∂P̄/∂q̄_j)`.
fn q_gradient(p: &Polynomial<Complex64>, q: &State) -> Vec<Complex64> {
    let conj = Polynomial::from_terms(p.iter().map(|(n, c)| (n.conjugate(), c.conj())));
    polynomial_conj_gradient(&conj, q).into_iter().map(|g| g.conj()).collect()
}

fn to_float(p: &Polynomial<dnls_core::algebra::ExactComplex>) -> Polynomial<Complex64> {
    use num_traits::ToPrimitive;
    Polynomial::from_terms(
        p.iter()
            .map(|(n, c)| (n.clone(), Complex64::new(c.re.to_f64().unwrap(), c.im.to_f64().unwrap()))),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bracket_antisymmetric(a in exact_term(), b in exact_term()) {
        let ab = a.bracket(&b);
        let ba = b.bracket(&a);
        prop_assert_eq!(ab, ba.neg());
    }

    #[test]
    fn bracket_jacobi(a in exact_term(), b in exact_term(), c in exact_term()) {
        let mut sum = a.bracket(&b.bracket(&c));
        sum.add_assign(&b.bracket(&c.bracket(&a)));
        sum.add_assign(&c.bracket(&a.bracket(&b)));
        prop_assert!(sum.is_empty(), "{:?}", sum);
    }

    #[test]
    fn bracket_keeps_gauge_balance(m in gauge_monomial(), n in gauge_monomial()) {
        let a = Polynomial::monomial(m, exact(1, 1, 0, 1));
        let b = Polynomial::monomial(n, exact(0, 1, 1, 1));
        for (k, _) in a.bracket(&b).iter() {
            prop_assert!(k.is_gauge_balanced());
        }
    }

    #[test]
    fn degree_and_diameter_law(m in monomial(), n in monomial()) {
        let a = Polynomial::monomial(m.clone(), exact(1, 1, 0, 1));
        let b = Polynomial::monomial(n.clone(), exact(1, 1, 0, 1));
        let r = a.bracket(&b);
        let overlap = m.support().any(|s| n.support().any(|t| t == s));
        if !overlap {
            prop_assert!(r.is_empty());
        }
        for (k, _) in r.iter() {
            prop_assert_eq!(k.degree(), m.degree() + n.degree() - 2);
            prop_assert!(k.diameter() <= m.diameter() + n.diameter());
        }
    }

    #[test]
    fn bracket_matches_derivative_oracle(a in exact_term(), b in exact_term(), seed in 0u64..1000) {
        // {A, B}(q) = Σ_j ∂A/∂q̄_j ∂B/∂q_j - ∂A/∂q_j ∂B/∂q̄_j, evaluated pointwise
        let (fa, fb) = (to_float(&a), to_float(&b));
        let lattice = LatticeBox::new(4).unwrap();
        let q = random_state(lattice, seed, 1.0);
        let h = Hamiltonian::from_polynomial(lattice, to_float(&a.bracket(&b)));
        let lhs: Complex64 = h.terms().iter().map(|(n, c)| c * dnls_core::algebra::monomial_value(n, &q)).sum();
        let (ab, aq) = (polynomial_conj_gradient(&fa, &q), q_gradient(&fa, &q));
        let (bb, bq) = (polynomial_conj_gradient(&fb, &q), q_gradient(&fb, &q));
        let rhs: Complex64 = (0..ab.len()).map(|j| ab[j] * bq[j] - aq[j] * bb[j]).sum();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn canonical_form_is_order_free(raw in prop::collection::vec((-5i64..5, 0i64..3, 0i64..3), 0..6)) {
        let a = MultiIndex::canonicalize(raw.clone()).unwrap();
        let mut rev = raw.clone();
        rev.reverse();
        prop_assert_eq!(&a, &MultiIndex::canonicalize(rev).unwrap());
        prop_assert_eq!(a.conjugate().conjugate(), a.clone());
        prop_assert_eq!(a.degree() as i64, raw.iter().map(|e| e.1 + e.2).sum::<i64>());
    }
}

#[test]
fn initial_hamiltonian_coefficients_are_the_equation() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let lattice = LatticeBox::new(6).unwrap();
    for trial in 0..100 {
        let v = DisorderRealization::sample(trial, lattice);
        let (e1, e2): (f64, f64) = (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5));
        let h = Hamiltonian::initial(&v, e1, e2).unwrap();
        // q̇ = -2i ∂H/∂q̄: twice the coefficient of each term is the equation's
        for j in lattice.sites() {
            assert_eq!(2.0 * h.diagonal_at(j), v.v(j));
            assert_eq!(4.0 * h.terms().coefficient(&MultiIndex::single(j, 2, 2)).re, e2);
            if j < lattice.max_site() {
                assert_eq!(2.0 * h.terms().coefficient(&MultiIndex::pair(j, j + 1)).re, e1);
                assert_eq!(2.0 * h.terms().coefficient(&MultiIndex::pair(j + 1, j)).re, e1);
            }
        }
        assert_eq!(h.len(), lattice.len() + 2 * (lattice.len() - 1));
        let q = random_state(lattice, trial, 1.0);
        let vv: Vec<f64> = lattice.sites().map(|j| v.v(j)).collect();
        let want = lattice_rhs(&q, &vv, e1, e2);
        let got = h.vector_field(&q);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-14, "{a} {b}");
        }
    }
}

#[test]
fn json_round_trip_is_exact() {
    let lattice = LatticeBox::new(5).unwrap();
    let v = DisorderRealization::sample(3, lattice);
    let h = Hamiltonian::initial(&v, 0.03, 0.01).unwrap();
    let j = h.to_json();
    let text = serde_json::to_string(&j).unwrap();
    let back = Hamiltonian::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back.terms(), h.terms());
    assert_eq!(back.diagonal(), h.diagonal());
}
