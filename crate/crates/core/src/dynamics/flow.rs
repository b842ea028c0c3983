//! Numerical flows of polynomial Hamiltonians and generators (RK4).

use num_complex::Complex64;

use crate::algebra::{polynomial_conj_gradient, Hamiltonian, Polynomial, State};

fn rk4(q: &State, dt: f64, steps: usize, field: impl Fn(&State) -> Vec<Complex64>) -> State {
    let mut x = q.clone();
    let lattice = q.lattice();
    let shifted = |x: &State, k: &[Complex64], h: f64| {
        let amps = x.as_slice().iter().zip(k).map(|(a, b)| a + b * h).collect();
        State::from_vec(lattice, amps).expect("same box")
    };
    for _ in 0..steps {
        let k1 = field(&x);
        let k2 = field(&shifted(&x, &k1, 0.5 * dt));
        let k3 = field(&shifted(&x, &k2, 0.5 * dt));
        let k4 = field(&shifted(&x, &k3, dt));
        for (i, z) in x.as_mut_slice().iter_mut().enumerate() {
            *z += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
    }
    x
}

/// Flow of `q̇ = -2i ∂H/∂q̄` for `steps` steps of size `dt`.
pub fn hamiltonian_flow(h: &Hamiltonian, q: &State, dt: f64, steps: usize) -> State {
    rk4(q, dt, steps, |x| h.vector_field(x))
}

/// Time-`t` flow of an anti-real generator, `q̇ = -∂F/∂q̄`. Composing
/// `H` with it reproduces `exp(ad_F) H` under the bracket used throughout.
pub fn generator_flow(f: &Polynomial<Complex64>, q: &State, t: f64, steps: usize) -> State {
    rk4(q, t / steps as f64, steps, |x| {
        polynomial_conj_gradient(f, x).into_iter().map(|g| -g).collect()
    })
}

/// `Γ = Φ_{F_1} ∘ … ∘ Φ_{F_K}`: the last generator acts first, so that
/// `H_1 ∘ Γ` matches the Hamiltonian after all rounds.
pub fn composed_transform(generators: &[&Polynomial<Complex64>], q: &State, steps: usize) -> State {
    let mut x = q.clone();
    for f in generators.iter().rev() {
        x = generator_flow(f, &x, 1.0, steps);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LatticeBox;
    use crate::disorder::DisorderRealization;
    use crate::dynamics::SplitStepper;

    #[test]
    fn rk4_agrees_with_split_step() {
        let b = LatticeBox::new(8).unwrap();
        let v = DisorderRealization::sample(5, b);
        let h = Hamiltonian::initial(&v, 0.05, 0.05).unwrap();
        let q = State::from_fn(b, |j| Complex64::new(0.5 / (1.0 + (j * j) as f64), 0.0));
        let vv: Vec<f64> = b.sites().map(|j| v.tilde(j)).collect();
        let mut st = SplitStepper::new(vv, 0.05, 0.05, 1e-3);
        let mut x = q.clone();
        for _ in 0..1000 {
            st.step(&mut x);
        }
        let y = hamiltonian_flow(&h, &q, 1e-2, 100);
        assert!(x.max_abs_diff(&y) < 1e-6, "{}", x.max_abs_diff(&y));
    }

    #[test]
    fn generator_flow_inverts() {
        let b = LatticeBox::new(3).unwrap();
        let mut f = Polynomial::<Complex64>::new();
        let c = Complex64::new(0.1, 0.2);
        f.add_term(crate::algebra::MultiIndex::pair(0, 1), c);
        f.add_term(crate::algebra::MultiIndex::pair(1, 0), -c.conj());
        let q = State::from_fn(b, |j| Complex64::new(0.3 * j as f64, 0.4));
        let neg = f.neg();
        let there = generator_flow(&f, &q, 1.0, 64);
        let back = generator_flow(&neg, &there, 1.0, 64);
        assert!(back.max_abs_diff(&q) < 1e-10);
        // quadratic anti-Hermitian generators are unitary
        assert!((there.norm() - q.norm()).abs() < 1e-10);
    }
}
