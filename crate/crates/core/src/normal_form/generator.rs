use num_complex::Complex64;

use super::schedule::NormalFormSchedule;
use super::NormalFormError;
use crate::algebra::{Hamiltonian, MultiIndex, Polynomial};
use crate::disorder::DisorderRealization;

/// `Ω(n) = Σ (n_j - n'_j) ṽ_j`.
pub fn small_divisor(n: &MultiIndex, v: &DisorderRealization) -> f64 {
    n.linear_form(|j| v.tilde(j))
}

/// Anti-real generator `F` of one transformation round.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub step: u32,
    pub poly: Polynomial<Complex64>,
    /// Target representatives with their divisors, sorted by index.
    pub targets: Vec<(MultiIndex, f64)>,
}

impl Generator {
    pub fn is_zero(&self) -> bool {
        self.poly.is_empty()
    }

    pub fn min_divisor(&self) -> f64 {
        self.targets
            .iter()
            .map(|(_, w)| w.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// How the terms removed in a round are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSelection {
    /// Non-resonant, supported in the step-`s` bands, `|c| > δ_{s+1}`.
    Threshold,
    /// A fixed list of representatives (replaying an earlier run).
    Frozen(Vec<MultiIndex>),
}

/// Representatives `n ≤ n̄` of the terms `selection` picks out of `h`.
pub fn select_targets(
    h: &Hamiltonian,
    schedule: &NormalFormSchedule,
    s: u32,
    selection: &TargetSelection,
) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = match selection {
        TargetSelection::Threshold => {
            let cut = schedule.next_delta(s);
            h.terms()
                .iter()
                .filter(|(n, c)| {
                    n.is_pair_representative()
                        && !n.is_resonant()
                        && c.norm() > cut
                        && n.support().all(|j| schedule.in_bands(s, j))
                })
                .map(|(n, _)| n.clone())
                .collect()
        }
        TargetSelection::Frozen(list) => list
            .iter()
            .filter(|n| h.terms().get(n).is_some())
            .cloned()
            .collect(),
    };
    out.sort();
    out
}

/// Generator whose bracket with the diagonal cancels the selected terms:
/// `f(n) = -2 c(n) / Ω(n)` for a diagonal stored as `½ ṽ_j |q_j|²`.
pub fn build_generator(
    h: &Hamiltonian,
    schedule: &NormalFormSchedule,
    s: u32,
    selection: &TargetSelection,
) -> Result<Generator, NormalFormError> {
    let threshold = schedule.step(s).divisor_threshold;
    let targets = select_targets(h, schedule, s, selection);
    let mut poly = Polynomial::new();
    let mut with_divisor = Vec::with_capacity(targets.len());
    let mut worst: Option<(MultiIndex, f64)> = None;
    let mut offending = 0;
    for n in targets {
        let omega = h.divisor(&n);
        if omega.abs() <= threshold {
            offending += 1;
            if worst.as_ref().is_none_or(|(_, w)| omega.abs() < w.abs()) {
                worst = Some((n.clone(), omega));
            }
            continue;
        }
        let c = h.terms().coefficient(&n);
        let conj = n.conjugate();
        let c_bar = h.terms().coefficient(&conj);
        poly.add_term(n.clone(), c * (-2.0 / omega));
        if conj != n {
            poly.add_term(conj, c_bar * (2.0 / omega));
        }
        with_divisor.push((n, omega));
    }
    if let Some((n, omega)) = worst {
        return Err(NormalFormError::ResonanceViolation {
            step: s,
            index: n.to_string(),
            omega,
            threshold,
            count: offending,
        });
    }
    Ok(Generator {
        step: s,
        poly,
        targets: with_divisor,
    })
}
