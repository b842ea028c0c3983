//! Finite-difference derivatives of the normal form with respect to the
//! potential: coefficient gradients, `∂W/∂V` and the Jacobian of `V ↦ V + W`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::run::{run_normal_form, NormalFormOptions, NormalFormResult};
use super::NormalFormError;
use crate::algebra::{Hamiltonian, MultiIndex};
use crate::disorder::DisorderRealization;
use crate::exec::par_map;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedProbe {
    pub site: i32,
    pub sign: i8,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub h: f64,
    /// Sites `||j| - j0| ≤ N + 1` whose `v_j` were perturbed.
    pub sites: Vec<i32>,
    /// Largest `|∇_V c(n)|` (ℓ² over the probed sites) among the final band terms.
    pub max_coeff_gradient: f64,
    pub worst_index: Option<String>,
    /// Largest singular value of the finite matrix `∂w_i/∂v_j`.
    pub w_operator_norm: f64,
    /// `ε^{1/40}`.
    pub w_threshold: f64,
    /// `det(I + ∂W/∂V)`.
    pub jacobian_det: f64,
    /// `(e^{-2Nε^{1/40}}, e^{2Nε^{1/40}})`.
    pub det_bracket: (f64, f64),
    pub failed_probes: Vec<FailedProbe>,
}

impl SensitivityReport {
    pub fn gradient_ok(&self) -> bool {
        self.max_coeff_gradient < 1.0
    }

    pub fn w_ok(&self) -> bool {
        self.w_operator_norm < self.w_threshold
    }

    pub fn det_ok(&self) -> bool {
        self.jacobian_det > self.det_bracket.0 && self.jacobian_det < self.det_bracket.1
    }

    pub fn passes(&self) -> bool {
        self.failed_probes.is_empty() && self.gradient_ok() && self.w_ok() && self.det_ok()
    }
}

/// Parameters shared by the base run and every probe.
#[derive(Clone, Debug)]
pub struct SensitivityInput<'a> {
    pub v: &'a DisorderRealization,
    pub eps1: f64,
    pub eps2: f64,
    pub order: f64,
    pub j0: i64,
    pub n: i64,
    pub h: f64,
    pub options: &'a NormalFormOptions,
}

struct Probe {
    w: Vec<f64>,
    coeffs: Vec<num_complex::Complex64>,
}

fn run_at(input: &SensitivityInput<'_>, v: &DisorderRealization, opts: &NormalFormOptions) -> Result<NormalFormResult, NormalFormError> {
    let h = Hamiltonian::initial(v, input.eps1, input.eps2)?;
    run_normal_form(&h, v, input.eps1 + input.eps2, input.order, input.j0, input.n, opts)
}

/// Central differences with step `h` at every window site. Probes replay the
/// base run's rounds (targets, series depth and kept terms) so that the
/// difference quotients see one smooth map.
pub fn sensitivity_check(input: &SensitivityInput<'_>) -> Result<SensitivityReport, NormalFormError> {
    let eps = input.eps1 + input.eps2;
    let base_opts = NormalFormOptions {
        record_plan: true,
        replay: None,
        ..input.options.clone()
    };
    let base = run_at(input, input.v, &base_opts)?;
    let lattice = input.v.lattice();
    let sites: Vec<i32> = lattice
        .sites()
        .filter(|j| ((j.unsigned_abs() as i64) - input.j0).abs() <= input.n + 1)
        .collect();
    let (a, b) = base.schedule.barrier();
    let mut band: Vec<MultiIndex> = base
        .hamiltonian
        .terms()
        .iter()
        .filter(|(n, _)| {
            n.support().any(|j| {
                let j = j.unsigned_abs() as i64;
                j >= a && j <= b
            })
        })
        .map(|(n, _)| n.clone())
        .collect();
    band.sort();

    let replay_opts = NormalFormOptions {
        record_plan: false,
        replay: Some(base.plan.clone()),
        ..input.options.clone()
    };
    let jobs: Vec<(usize, i8)> = (0..sites.len()).flat_map(|k| [(k, 1i8), (k, -1i8)]).collect();
    let outcomes = par_map(&jobs, |&(k, sign)| {
        let j = sites[k];
        let moved = input.v.with_v(j, input.v.v(j) + sign as f64 * input.h);
        run_at(input, &moved, &replay_opts).map(|r| Probe {
            w: sites.iter().map(|&i| r.realization.w(i)).collect(),
            coeffs: band.iter().map(|n| r.hamiltonian.terms().coefficient(n)).collect(),
        })
    });

    let m = sites.len();
    let mut jac = DMatrix::<f64>::zeros(m, m);
    let mut grad_sq = vec![0.0; band.len()];
    let mut failed = Vec::new();
    for k in 0..m {
        let (plus, minus) = (&outcomes[2 * k], &outcomes[2 * k + 1]);
        match (plus, minus) {
            (Ok(p), Ok(q)) => {
                for i in 0..m {
                    jac[(i, k)] = (p.w[i] - q.w[i]) / (2.0 * input.h);
                }
                for (g, (cp, cq)) in grad_sq.iter_mut().zip(p.coeffs.iter().zip(&q.coeffs)) {
                    *g += ((cp - cq) / (2.0 * input.h)).norm_sqr();
                }
            }
            _ => {
                for (sign, r) in [(1i8, plus), (-1i8, minus)] {
                    if let Err(e) = r {
                        failed.push(FailedProbe {
                            site: sites[k],
                            sign,
                            error: e.to_string(),
                        });
                    }
                }
            }
        }
    }
    let (worst, max_grad) = grad_sq
        .iter()
        .enumerate()
        .fold((None, 0.0f64), |(wi, wm), (i, g)| if g.sqrt() > wm { (Some(i), g.sqrt()) } else { (wi, wm) });
    let w_operator_norm = if m == 0 {
        0.0
    } else {
        jac.clone().singular_values().max()
    };
    let jacobian_det = (DMatrix::<f64>::identity(m, m) + &jac).determinant();
    let w_threshold = if eps == 0.0 { 0.0 } else { eps.powf(1.0 / 40.0) };
    let spread = 2.0 * input.n as f64 * w_threshold;
    Ok(SensitivityReport {
        h: input.h,
        sites,
        max_coeff_gradient: max_grad,
        worst_index: worst.map(|i| band[i].to_string()),
        w_operator_norm,
        w_threshold,
        jacobian_det,
        det_bracket: ((-spread).exp(), spread.exp()),
        failed_probes: failed,
    })
}
