//! Fixed-step Strang integration sampled on a logarithmic time grid.

use serde::{Deserialize, Serialize};

use super::io::Snapshot;
use super::observe::{edge_mass, lattice_energy, lattice_flux, truncated_mass};
use super::split::SplitStepper;
use super::DynamicsError;
use crate::algebra::State;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Number of log-spaced samples after `t = 0`.
    pub samples: usize,
    pub j0: i64,
    pub n: i64,
    /// Sites at each end of the box counted as edge.
    pub edge_width: usize,
    pub edge_limit: f64,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64, j0: i64, n: i64) -> Self {
        Self {
            dt,
            t_end,
            samples: 512,
            j0,
            n,
            edge_width: 8,
            edge_limit: 1e-8,
        }
    }

    /// Whole steps to reach `t_end`; the step is shortened to land on it.
    pub fn steps(&self) -> u64 {
        if self.t_end <= 0.0 {
            0
        } else {
            (self.t_end / self.dt).ceil().max(1.0) as u64
        }
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            k => self.t_end / k as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub m_j0: f64,
    pub m_j0n: f64,
    pub edge_mass: f64,
    /// Lattice flux through `|j| = j0`.
    pub flux: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObserverSeries {
    pub samples: Vec<Sample>,
}

impl ObserverSeries {
    pub fn max_m_j0n(&self) -> f64 {
        self.samples.iter().map(|s| s.m_j0n).fold(0.0, f64::max)
    }

    pub fn max_relative_norm_drift(&self) -> f64 {
        let n0 = self.samples.first().map_or(0.0, |s| s.norm);
        if n0 == 0.0 {
            return 0.0;
        }
        self.samples.iter().map(|s| (s.norm - n0).abs() / n0).fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples.first().map_or(0.0, |s| s.energy);
        self.samples.iter().map(|s| (s.energy - e0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub series: ObserverSeries,
    pub last: Snapshot,
    pub steps: u64,
}

/// Step counts of `samples` log-spaced times in `(0, steps]`, deduplicated,
/// always ending at `steps`; preceded by 0.
pub fn sample_steps(steps: u64, samples: usize) -> Vec<u64> {
    let mut out = vec![0];
    if steps == 0 || samples == 0 {
        return out;
    }
    let top = (steps as f64).ln();
    for i in 0..samples {
        let x = if samples == 1 { top } else { top * i as f64 / (samples - 1) as f64 };
        let k = (x.exp().round() as u64).clamp(1, steps);
        if k > *out.last().unwrap() {
            out.push(k);
        }
    }
    if *out.last().unwrap() != steps {
        out.push(steps);
    }
    out
}

fn observe(q: &State, t: f64, stepper: &SplitStepper, cfg: &IntegratorConfig) -> Sample {
    Sample {
        t,
        norm: q.norm(),
        energy: lattice_energy(q, stepper.potential(), stepper.eps1(), stepper.eps2()),
        m_j0: truncated_mass(q, cfg.j0),
        m_j0n: truncated_mass(q, cfg.j0 + cfg.n),
        edge_mass: edge_mass(q, cfg.edge_width),
        flux: lattice_flux(q, stepper.eps1(), cfg.j0),
    }
}

/// Runs `stepper` (whose `dt` must equal `cfg.effective_dt()`) from `q0`.
/// Aborts on a non-finite norm or edge mass above the limit, returning the
/// last finite snapshot and the samples so far.
pub fn integrate(q0: &State, stepper: &mut SplitStepper, cfg: &IntegratorConfig) -> Result<Trajectory, DynamicsError> {
    if !(cfg.dt > 0.0) || !(cfg.t_end >= 0.0) {
        return Err(DynamicsError::InvalidParameter(format!("dt = {}, T = {}", cfg.dt, cfg.t_end)));
    }
    let dt = cfg.effective_dt();
    if (stepper.dt() - dt).abs() > 1e-14 * dt {
        return Err(DynamicsError::InvalidParameter(format!(
            "stepper dt {} differs from the grid step {dt}",
            stepper.dt()
        )));
    }
    let steps = cfg.steps();
    let grid = sample_steps(steps, cfg.samples);
    let mut q = q0.clone();
    let mut series = ObserverSeries::default();
    let mut last_good = Snapshot { t: 0.0, state: q.clone() };
    let mut k = 0u64;
    for &target in &grid {
        while k < target {
            stepper.step(&mut q);
            k += 1;
            let t = k as f64 * dt;
            let edge = edge_mass(&q, cfg.edge_width);
            if !edge.is_finite() || (k % 256 == 0 && !q.norm().is_finite()) {
                return Err(DynamicsError::NonFinite {
                    last_good: Box::new(last_good),
                    series: Box::new(series),
                });
            }
            if edge > cfg.edge_limit {
                return Err(DynamicsError::EdgeMass {
                    t,
                    mass: edge,
                    limit: cfg.edge_limit,
                    last_good: Box::new(last_good),
                    series: Box::new(series),
                });
            }
        }
        let s = observe(&q, k as f64 * dt, stepper, cfg);
        if !s.norm.is_finite() || !s.energy.is_finite() {
            return Err(DynamicsError::NonFinite {
                last_good: Box::new(last_good),
                series: Box::new(series),
            });
        }
        last_good = Snapshot { t: s.t, state: q.clone() };
        series.samples.push(s);
    }
    Ok(Trajectory {
        series,
        last: last_good,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LatticeBox;
    use num_complex::Complex64;

    fn packet(b: LatticeBox) -> State {
        let mut q = State::from_fn(b, |j| Complex64::new(1.0 / (j as f64 / 4.0).cosh(), 0.0));
        let n = q.norm();
        q.scale(1.0 / n);
        q
    }

    #[test]
    fn grid_is_strictly_increasing() {
        let g = sample_steps(100_000, 512);
        assert_eq!(g[0], 0);
        assert_eq!(*g.last().unwrap(), 100_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_steps(0, 512), vec![0]);
        assert_eq!(sample_steps(3, 512), vec![0, 1, 2, 3]);
    }

    #[test]
    fn zero_time_has_one_sample() {
        let b = LatticeBox::new(20).unwrap();
        let q = packet(b);
        let cfg = IntegratorConfig::new(0.01, 0.0, 4, 2);
        let mut st = SplitStepper::new(vec![0.3; b.len()], 0.1, 0.1, cfg.effective_dt());
        let tr = integrate(&q, &mut st, &cfg).unwrap();
        assert_eq!(tr.series.samples.len(), 1);
        assert_eq!(tr.series.samples[0].t, 0.0);
        assert!((tr.series.samples[0].norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uncoupled_tail_is_frozen() {
        let b = LatticeBox::new(20).unwrap();
        let q = packet(b);
        let mut cfg = IntegratorConfig::new(0.05, 50.0, 4, 2);
        cfg.edge_limit = 1.0;
        let v: Vec<f64> = (0..b.len()).map(|k| (k as f64 * 0.37).fract()).collect();
        let mut st = SplitStepper::new(v, 0.0, 0.0, cfg.effective_dt());
        let tr = integrate(&q, &mut st, &cfg).unwrap();
        let m0 = tr.series.samples[0].m_j0;
        assert!(tr.series.samples.iter().all(|s| (s.m_j0 - m0).abs() < 1e-15));
    }

    #[test]
    fn edge_mass_aborts_with_snapshot() {
        let b = LatticeBox::new(10).unwrap();
        let mut q = State::zeros(b);
        q.set(8, Complex64::new(1.0, 0.0));
        let mut cfg = IntegratorConfig::new(0.05, 20.0, 2, 1);
        cfg.edge_width = 1;
        let mut st = SplitStepper::new(vec![0.0; b.len()], 0.5, 0.0, cfg.effective_dt());
        match integrate(&q, &mut st, &cfg) {
            Err(DynamicsError::EdgeMass { last_good, .. }) => assert!(last_good.state.norm() > 0.99),
            other => panic!("expected an edge abort, got {other:?}"),
        }
    }
}
