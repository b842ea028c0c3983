//! The full iteration `s = 1 .. s*-1` with its certificates.

use std::sync::Arc;

use rustc_hash::FxHashSet;
use serde::Serialize;

use super::generator::{build_generator, Generator, TargetSelection};
use super::lie::{
    extract_frequency_shift, lie_transform_recorded, lie_transform_replay, FrequencyShift, LieOptions, LieStats,
};
use super::schedule::{build_schedule, NormalFormSchedule, ScheduleConstants, ScheduleStep};
use super::NormalFormError;
use crate::algebra::{Hamiltonian, LatticeBox, MultiIndex};
use crate::disorder::DisorderRealization;

#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormOptions {
    pub constants: ScheduleConstants,
    /// Default `ε^{2A}`.
    pub tail_floor: Option<f64>,
    /// Default `ε^{2A}`.
    pub coeff_floor: Option<f64>,
    pub max_depth: u32,
    /// Generator rounds allowed per step before giving up.
    pub max_rounds: u32,
    pub term_cap: usize,
    /// Degree/diameter cap for terms near the window; default from the schedule.
    pub prune_cap: Option<u32>,
    /// Repeat these rounds (targets, depth and kept terms) instead of
    /// selecting and truncating adaptively.
    pub replay: Option<Vec<RoundPlan>>,
    /// Record each round's [`RoundPlan`] in the result.
    pub record_plan: bool,
}

/// One generator round as needed to repeat it at a nearby potential.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundPlan {
    pub step: u32,
    pub targets: Vec<MultiIndex>,
    /// Indices kept at each order of the series.
    pub keep: Arc<Vec<FxHashSet<MultiIndex>>>,
}

impl Default for NormalFormOptions {
    fn default() -> Self {
        Self {
            constants: ScheduleConstants::desk(),
            tail_floor: None,
            coeff_floor: None,
            max_depth: 40,
            max_rounds: 16,
            term_cap: 4_000_000,
            prune_cap: None,
            replay: None,
            record_plan: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundRecord {
    pub step: u32,
    pub round: u32,
    pub targets: usize,
    pub largest_target: f64,
    pub min_divisor: f64,
    pub terms_after: usize,
    pub lie: LieStats,
    pub max_shift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A non-resonant term above `δ_{s+1}` survives in the step-(s+1) bands.
    Cancellation { step: u32, index: String, magnitude: f64, bound: f64 },
    /// A non-resonant term meeting the final bands is not below `ε^A`.
    Barrier { index: String, magnitude: f64, bound: f64 },
    /// Weighted decay bound with `ρ_{s*}` fails.
    Decay { index: String, magnitude: f64, bound: f64 },
    /// Frequency shift outside `||j| - j0| ≤ N + 1`.
    ShiftSupport { site: i32, shift: f64 },
    /// Generated ℓ¹ mass not matched by kept plus dropped mass.
    Bookkeeping { step: u32, round: u32, generated: f64, accounted: f64 },
    /// Reality or gauge symmetry lost.
    Symmetry { detail: String },
}

/// Bounds the construction asserts along the way that are reported but do not
/// decide acceptance.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// `|w_j^{(s)}| ≥ δ_{s+1}`.
    ShiftSize { step: u32, site: i32, shift: f64, bound: f64 },
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub hamiltonian: Hamiltonian,
    /// Potential with the accumulated frequency shift `W` installed.
    pub realization: DisorderRealization,
    pub schedule: NormalFormSchedule,
    pub generators: Vec<Generator>,
    pub rounds: Vec<RoundRecord>,
    pub violations: Vec<Violation>,
    pub diagnostics: Vec<Diagnostic>,
    pub eps_a: f64,
    pub max_band_coeff: f64,
    pub min_divisor: f64,
    /// Empty unless `record_plan` was set.
    pub plan: Vec<RoundPlan>,
}

impl NormalFormResult {
    pub fn certified(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn remainder_norm(&self) -> f64 {
        self.hamiltonian.remainder_norm()
    }

    pub fn shifts(&self) -> Vec<f64> {
        self.realization.shifts().to_vec()
    }
}

/// Single-step schedule for the uncoupled lattice, where nothing is removed.
fn trivial_schedule(order: f64, j0: i64, n: i64, constants: ScheduleConstants) -> NormalFormSchedule {
    NormalFormSchedule {
        eps: 0.0,
        order,
        j0,
        n,
        constants,
        steps: vec![ScheduleStep {
            s: 1,
            delta: 0.0,
            rho: constants.rho1,
            a: j0 - n,
            b: j0 + n,
            divisor_threshold: 0.0,
            diameter_bound: 0.0,
        }],
        s_star: 1,
        delta_after: 0.0,
    }
}

fn meets_bands(schedule: &NormalFormSchedule, s: u32, n: &MultiIndex) -> bool {
    n.support().any(|j| schedule.in_bands(s, j))
}

/// Largest non-resonant coefficient meeting the step-`s` bands, with its index.
fn band_maximum(h: &Hamiltonian, schedule: &NormalFormSchedule, s: u32) -> (f64, Option<MultiIndex>) {
    let mut best = (0.0, None);
    for (n, c) in h.terms().iter() {
        if !n.is_resonant() && meets_bands(schedule, s, n) && c.norm() > best.0 {
            best = (c.norm(), Some(n.clone()));
        }
    }
    best
}

pub fn run_normal_form(
    h: &Hamiltonian,
    v: &DisorderRealization,
    eps: f64,
    order: f64,
    j0: i64,
    n: i64,
    opts: &NormalFormOptions,
) -> Result<NormalFormResult, NormalFormError> {
    let lattice = h.lattice();
    if lattice != v.lattice() {
        return Err(NormalFormError::InvalidParameter("hamiltonian and potential live on different boxes".into()));
    }
    let required = LatticeBox::required_half_width(j0.max(0) as u32, n.max(0) as u32, order);
    if lattice.half_width() < required {
        return Err(crate::algebra::AlgebraError::BoxTooSmall {
            half_width: lattice.half_width(),
            required,
        }
        .into());
    }
    let schedule = if eps == 0.0 {
        if j0 < n {
            return Err(NormalFormError::InvalidParameter(format!("j0 = {j0} must be at least N = {n}")));
        }
        trivial_schedule(order, j0, n, opts.constants)
    } else {
        build_schedule(eps, order, j0, n, opts.constants)?
    };
    let eps_a = if eps == 0.0 { 0.0 } else { eps.powf(order) };
    let floor = eps.powf(2.0 * order);
    let lie_opts = LieOptions {
        tail_floor: opts.tail_floor.unwrap_or(floor),
        coeff_floor: opts.coeff_floor.unwrap_or(floor),
        max_depth: opts.max_depth,
        cap: opts.prune_cap.unwrap_or_else(|| schedule.prune_cap()),
        region: (j0 - n - 1, j0 + n + 1),
        term_cap: opts.term_cap,
    };

    let mut current = h.clone();
    let mut realization = v.clone();
    let mut generators = Vec::new();
    let mut rounds = Vec::new();
    let mut violations = Vec::new();
    let mut diagnostics = Vec::new();
    let mut replay = opts.replay.as_ref().map(|p| p.iter().peekable());
    let mut plan = Vec::new();

    for s in 1..schedule.s_star {
        let cut = schedule.next_delta(s);
        let mut step_shift = FrequencyShift::default();
        let mut round = 0;
        loop {
            let (selection, fixed) = match replay.as_mut() {
                Some(rounds) => match rounds.peek() {
                    Some(r) if r.step == s => {
                        let r = rounds.next().unwrap();
                        (TargetSelection::Frozen(r.targets.clone()), Some(r))
                    }
                    _ => break,
                },
                None => (TargetSelection::Threshold, None),
            };
            let g = build_generator(&current, &schedule, s, &selection)?;
            if g.is_zero() {
                if fixed.is_some() {
                    continue;
                }
                break;
            }
            round += 1;
            if round > opts.max_rounds {
                let (largest, _) = band_maximum(&current, &schedule, s);
                return Err(NormalFormError::RoundsExhausted {
                    step: s,
                    rounds: opts.max_rounds,
                    remaining: g.targets.len(),
                    largest,
                });
            }
            let largest_target = g
                .targets
                .iter()
                .map(|(n, _)| current.terms().coefficient(n).norm())
                .fold(0.0, f64::max);
            let mut kept_sets = Vec::new();
            let (next, lie) = match fixed {
                Some(r) => lie_transform_replay(&current, &g.poly, &r.keep),
                None => lie_transform_recorded(
                    &current,
                    &g.poly,
                    &lie_opts,
                    opts.record_plan.then_some(&mut kept_sets),
                )?,
            };
            if opts.record_plan {
                plan.push(RoundPlan {
                    step: s,
                    targets: g.targets.iter().map(|(n, _)| n.clone()).collect(),
                    keep: Arc::new(kept_sets),
                });
            }
            let accounted = lie.kept_mass + lie.dropped_mass;
            if (accounted - lie.generated_mass).abs() > 1e-9 * lie.generated_mass.max(1e-300) {
                violations.push(Violation::Bookkeeping {
                    step: s,
                    round,
                    generated: lie.generated_mass,
                    accounted,
                });
            }
            let (next, shift) = extract_frequency_shift(&next);
            for &(j, w) in &shift.shifts {
                realization.add_shift(j, w);
            }
            step_shift.merge(&shift);
            rounds.push(RoundRecord {
                step: s,
                round,
                targets: g.targets.len(),
                largest_target,
                min_divisor: g.min_divisor(),
                terms_after: next.len(),
                lie,
                max_shift: shift.max_abs(),
            });
            current = next;
            generators.push(g);
        }
        for &(j, w) in &step_shift.shifts {
            if w.abs() >= cut {
                diagnostics.push(Diagnostic::ShiftSize {
                    step: s,
                    site: j,
                    shift: w,
                    bound: cut,
                });
            }
        }
        let mut survivors: Vec<_> = current
            .terms()
            .iter()
            .filter(|(n, c)| !n.is_resonant() && c.norm() > cut && meets_bands(&schedule, s + 1, n))
            .map(|(n, c)| (n.clone(), c.norm()))
            .collect();
        survivors.sort_by(|a, b| a.0.cmp(&b.0));
        for (n, m) in survivors {
            violations.push(Violation::Cancellation {
                step: s,
                index: n.to_string(),
                magnitude: m,
                bound: cut,
            });
        }
    }

    let s_star = schedule.s_star;
    let mut band: Vec<_> = current
        .terms()
        .iter()
        .filter(|(n, _)| !n.is_resonant() && meets_bands(&schedule, s_star, n))
        .map(|(n, c)| (n.clone(), c.norm()))
        .collect();
    band.sort_by(|a, b| a.0.cmp(&b.0));
    let max_band_coeff = band.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    for (n, m) in band {
        if m >= eps_a {
            violations.push(Violation::Barrier {
                index: n.to_string(),
                magnitude: m,
                bound: eps_a,
            });
        }
    }
    if eps > 0.0 {
        for d in current.weighted_norm_check(schedule.final_rho(), eps) {
            violations.push(Violation::Decay {
                index: d.index,
                magnitude: d.magnitude,
                bound: d.bound,
            });
        }
    }
    for j in lattice.sites() {
        let w = realization.w(j);
        if w != 0.0 && ((j.abs() as i64) - j0).abs() > n + 1 {
            violations.push(Violation::ShiftSupport { site: j, shift: w });
        }
    }
    let defect = current.reality_defect();
    if defect > 1e-12 * current.l1_norm().max(1.0) {
        violations.push(Violation::Symmetry {
            detail: format!("reality defect {defect:.3e}"),
        });
    }
    if !current.is_gauge_balanced() {
        violations.push(Violation::Symmetry {
            detail: "gauge balance lost".into(),
        });
    }
    let min_divisor = generators
        .iter()
        .map(Generator::min_divisor)
        .fold(f64::INFINITY, f64::min);
    Ok(NormalFormResult {
        hamiltonian: current,
        realization,
        schedule,
        generators,
        rounds,
        violations,
        diagnostics,
        eps_a,
        max_band_coeff,
        min_divisor,
        plan,
    })
}
