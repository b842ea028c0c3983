use serde::{Deserialize, Serialize};

use super::run::{Diagnostic, NormalFormResult, RoundRecord, Violation};
use super::schedule::ScheduleStep;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierReport {
    pub a: i64,
    pub b: i64,
    #[serde(rename = "eps_A")]
    pub eps_a: f64,
    pub max_band_coeff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftEntry {
    pub site: i32,
    pub w: f64,
}

/// Certificate report of one normal-form run. `violations` and `diagnostics`
/// are kept as JSON values so the report reads back without the enums.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormReport {
    pub schedule: Vec<ScheduleStep>,
    pub s_star: u32,
    pub barrier: BarrierReport,
    #[serde(rename = "W")]
    pub w: Vec<ShiftEntry>,
    pub remainder_norm: f64,
    pub violations: Vec<serde_json::Value>,
    pub violation_counts: std::collections::BTreeMap<String, usize>,
    pub diagnostics: Vec<serde_json::Value>,
    pub rounds: Vec<serde_json::Value>,
    pub min_divisor: Option<f64>,
    /// `ρ_{s*}` and the largest rate the stored terms actually decay with.
    pub decay_rate: f64,
    pub decay_rate_effective: Option<f64>,
    pub decay_limiting_index: Option<String>,
    pub terms: usize,
    pub certified: bool,
}

fn kind(v: &Violation) -> &'static str {
    match v {
        Violation::Cancellation { .. } => "cancellation",
        Violation::Barrier { .. } => "barrier",
        Violation::Decay { .. } => "decay",
        Violation::ShiftSupport { .. } => "shift_support",
        Violation::Bookkeeping { .. } => "bookkeeping",
        Violation::Symmetry { .. } => "symmetry",
    }
}

fn to_values<T: Serialize>(items: &[T]) -> Vec<serde_json::Value> {
    items
        .iter()
        .map(|x| serde_json::to_value(x).expect("report entries serialize"))
        .collect()
}

impl NormalFormReport {
    /// `max_listed` caps how many violations of each kind are written out; the
    /// counts always cover all of them.
    pub fn from_result(r: &NormalFormResult, max_listed: usize) -> Self {
        let (a, b) = r.schedule.barrier();
        let mut counts = std::collections::BTreeMap::new();
        let mut listed: Vec<&Violation> = Vec::new();
        for v in &r.violations {
            let c = counts.entry(kind(v).to_string()).or_insert(0usize);
            *c += 1;
            if *c <= max_listed {
                listed.push(v);
            }
        }
        let eff = if r.schedule.eps > 0.0 {
            r.hamiltonian.effective_decay_rate(r.schedule.eps)
        } else {
            None
        };
        let lattice = r.realization.lattice();
        let w = lattice
            .sites()
            .filter(|&j| r.realization.w(j) != 0.0)
            .map(|j| ShiftEntry {
                site: j,
                w: r.realization.w(j),
            })
            .collect();
        Self {
            schedule: r.schedule.steps.clone(),
            s_star: r.schedule.s_star,
            barrier: BarrierReport {
                a,
                b,
                eps_a: r.eps_a,
                max_band_coeff: r.max_band_coeff,
            },
            w,
            remainder_norm: r.remainder_norm(),
            violations: to_values(&listed),
            violation_counts: counts,
            diagnostics: to_values::<Diagnostic>(&r.diagnostics),
            rounds: to_values::<RoundRecord>(&r.rounds),
            min_divisor: r.min_divisor.is_finite().then_some(r.min_divisor),
            decay_rate: r.schedule.final_rho(),
            decay_rate_effective: eff.as_ref().map(|e| e.0),
            decay_limiting_index: eff.map(|e| e.1.to_string()),
            terms: r.hamiltonian.len(),
            certified: r.certified(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
