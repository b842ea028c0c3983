//! Step schedule of the normal-form iteration: coefficient thresholds `δ_s`,
//! decay rates `ρ_s` and the shrinking barrier bands `[a_s, b_s]`.

use serde::{Deserialize, Serialize};

use super::NormalFormError;

const MAX_STEPS: u32 = 10_000;

/// Numeric constants of the iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConstants {
    /// Exponent of the self-interaction term in `δ_s = δ_{s-1}^g + ε^σ δ_{s-1}`.
    pub growth: f64,
    /// `σ` in the same recursion.
    pub coupling_exponent: f64,
    /// Small-divisor threshold is `δ_s^{1 / (root · s^power)}`.
    pub divisor_root: f64,
    pub divisor_power: i32,
    /// Decay rate used to turn `|c| > δ` into a diameter bound. `Some(ρ)` fixes
    /// it; `None` uses the current `ρ_s`.
    pub caps_rho: Option<f64>,
    pub rho1: f64,
    /// `ρ_{s+1} = ρ_s (1 - 1/(k s²))`.
    pub rho_decay: f64,
}

impl ScheduleConstants {
    /// The constants exactly as the construction states them.
    pub fn literal() -> Self {
        Self {
            growth: 1.9,
            coupling_exponent: 0.05,
            divisor_root: 100.0,
            divisor_power: 2,
            caps_rho: Some(0.1),
            rho1: 0.5,
            rho_decay: 10.0,
        }
    }

    /// Calibrated for desk-scale runs (ε ≈ 0.02–0.1, A ≤ 3, N ≈ 32): the
    /// coupling factor is `ε` instead of `ε^{1/20}`, the divisor threshold is
    /// `δ_s` itself and the caps follow the current decay rate.
    pub fn desk() -> Self {
        Self {
            growth: 1.9,
            coupling_exponent: 1.0,
            divisor_root: 1.0,
            divisor_power: 0,
            caps_rho: None,
            rho1: 0.5,
            rho_decay: 10.0,
        }
    }

    pub fn divisor_exponent(&self, s: u32) -> f64 {
        1.0 / (self.divisor_root * (s as f64).powi(self.divisor_power))
    }
}

impl Default for ScheduleConstants {
    fn default() -> Self {
        Self::desk()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub s: u32,
    pub delta: f64,
    pub rho: f64,
    pub a: i64,
    pub b: i64,
    /// `δ_s^{1/(root s^power)}`.
    pub divisor_threshold: f64,
    /// Terms with `|c| > δ_{s+1}` satisfy `Δ(n) < diameter_bound`.
    pub diameter_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormSchedule {
    pub eps: f64,
    pub order: f64,
    pub j0: i64,
    pub n: i64,
    pub constants: ScheduleConstants,
    /// Steps `1..=s*`; the last entry carries the final barrier.
    pub steps: Vec<ScheduleStep>,
    pub s_star: u32,
    /// `δ_{s*+1}`, needed for the constraint set of the final step.
    pub delta_after: f64,
}

/// `N_min(A) = max(⌈8A²⌉, 8)`.
pub fn minimum_half_width(order: f64) -> i64 {
    ((8.0 * order * order).ceil() as i64).max(8)
}

/// `δ_1, δ_2, …` until the first value below `ε^A`, plus one more.
pub fn delta_sequence(eps: f64, order: f64, c: &ScheduleConstants) -> Result<Vec<f64>, NormalFormError> {
    let target = eps.powf(order);
    let coupling = eps.powf(c.coupling_exponent);
    let mut deltas = vec![eps / 2.0];
    while *deltas.last().unwrap() >= target {
        if deltas.len() as u32 >= MAX_STEPS {
            return Err(NormalFormError::NoTermination { steps: MAX_STEPS });
        }
        let d = *deltas.last().unwrap();
        let next = d.powf(c.growth) + coupling * d;
        if next >= d {
            return Err(NormalFormError::NoTermination {
                steps: deltas.len() as u32,
            });
        }
        deltas.push(next);
    }
    let d = *deltas.last().unwrap();
    deltas.push(d.powf(c.growth) + coupling * d);
    Ok(deltas)
}

pub fn build_schedule(
    eps: f64,
    order: f64,
    j0: i64,
    n: i64,
    constants: ScheduleConstants,
) -> Result<NormalFormSchedule, NormalFormError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(NormalFormError::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(order > 1.0) {
        return Err(NormalFormError::InvalidParameter(format!("A = {order} must exceed 1")));
    }
    let n_min = minimum_half_width(order);
    if n < n_min {
        return Err(NormalFormError::InvalidParameter(format!(
            "N = {n} is below N_min(A) = {n_min}"
        )));
    }
    if j0 < n {
        return Err(NormalFormError::InvalidParameter(format!(
            "j0 = {j0} must be at least N = {n} so the two bands stay apart"
        )));
    }
    let deltas = delta_sequence(eps, order, &constants)?;
    let s_star = deltas.len() as u32 - 1;
    let log_inv_eps = (1.0 / eps).ln();
    let (inner_lo, inner_hi) = (j0 - (n + 1) / 2, j0 + (n + 1) / 2);

    let mut steps = Vec::with_capacity(s_star as usize);
    let (mut a, mut b, mut rho) = (j0 - n, j0 + n, constants.rho1);
    for s in 1..=s_star {
        if rho <= 0.1 {
            return Err(NormalFormError::InvalidParameter(format!(
                "decay rate ρ_{s} = {rho} fell to 1/10"
            )));
        }
        if a > inner_lo || b < inner_hi {
            return Err(NormalFormError::ScheduleInfeasible {
                step: s,
                a,
                b,
                inner: (inner_lo, inner_hi),
            });
        }
        let delta = deltas[s as usize - 1];
        let next = deltas[s as usize];
        let cap_rho = constants.caps_rho.unwrap_or(rho);
        let diameter_bound = (1.0 / next).ln() / (cap_rho * log_inv_eps);
        steps.push(ScheduleStep {
            s,
            delta,
            rho,
            a,
            b,
            divisor_threshold: delta.powf(constants.divisor_exponent(s)),
            diameter_bound,
        });
        let erosion = (2.0 * diameter_bound).ceil() as i64;
        a += erosion;
        b -= erosion;
        rho *= 1.0 - 1.0 / (constants.rho_decay * (s as f64).powi(2));
    }
    Ok(NormalFormSchedule {
        eps,
        order,
        j0,
        n,
        constants,
        steps,
        s_star,
        delta_after: deltas[s_star as usize],
    })
}

impl NormalFormSchedule {
    pub fn step(&self, s: u32) -> &ScheduleStep {
        &self.steps[s as usize - 1]
    }

    /// `δ_{s+1}`.
    pub fn next_delta(&self, s: u32) -> f64 {
        if s < self.s_star {
            self.step(s + 1).delta
        } else {
            self.delta_after
        }
    }

    /// Final barrier band `[a_{s*}, b_{s*}]`.
    pub fn barrier(&self) -> (i64, i64) {
        let last = self.steps.last().unwrap();
        (last.a, last.b)
    }

    pub fn final_rho(&self) -> f64 {
        self.steps.last().unwrap().rho
    }

    /// Degree/diameter cap for retained band terms: a term with
    /// `Δ + |n| - 2 ≥ 2A/ρ` obeys the decay bound only below `ε^{2A}`.
    pub fn prune_cap(&self) -> u32 {
        let rho = self.constants.caps_rho.unwrap_or(self.final_rho());
        (2.0 * self.order / rho).ceil() as u32
    }

    /// Largest `|n|` in the constraint sets.
    pub fn degree_cap(&self) -> u32 {
        self.prune_cap()
    }

    /// Whether `j` lies in `[-b_s, -a_s] ∪ [a_s, b_s]`.
    pub fn in_bands(&self, s: u32, j: i32) -> bool {
        let st = self.step(s);
        let j = j.unsigned_abs() as i64;
        j >= st.a && j <= st.b
    }

    /// Total erosion `|a_1 - a_{s*}| + |b_1 - b_{s*}|`.
    pub fn erosion(&self) -> i64 {
        let (first, last) = (&self.steps[0], self.steps.last().unwrap());
        (last.a - first.a) + (first.b - last.b)
    }
}
