mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use dnls_core::harness::*;

fn small(eps: f64, seeds: &[u64]) -> ExperimentConfig {
    let mut cfg = common::fixtures().config(eps, seeds.to_vec());
    cfg.sensitivity = false;
    cfg.conjugacy_states = 5;
    cfg
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn simulate_outputs_are_byte_identical() {
    let mut cfg = small(0.02, &[0, 63]);
    cfg.t_end = Some(20.0);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_simulate(a.path(), &run_simulate(&cfg).unwrap()).unwrap();
    write_simulate(b.path(), &run_simulate(&cfg).unwrap()).unwrap();
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert!(fa.contains_key("report.json") && fa.contains_key("series/seed_63.csv"));
    assert_eq!(fa, fb);
    // every artifact carries the resolved config
    for (name, bytes) in &fa {
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"jbar0\":64") || text.contains("\"jbar0\": 64"), "{name}");
    }
}

#[test]
fn measure_csv_is_byte_identical() {
    let mut cfg = small(0.004, &[]);
    cfg.measure.trials = 2000;
    cfg.measure.form_trials = 5000;
    cfg.measure.eps_grid = vec![0.004, 0.002];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    write_measure(a.path(), &run_measure(&cfg).unwrap()).unwrap();
    write_measure(b.path(), &run_measure(&cfg).unwrap()).unwrap();
    let (fa, fb) = (files(a.path()), files(b.path()));
    assert!(fa.contains_key("acceptance_trials.csv") && fa.contains_key("single_forms.csv"));
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa["acceptance_trials.csv"].clone()).unwrap();
    assert!(text.starts_with("# config: {"));
    assert_eq!(text.lines().count(), 2 + 2000);
}

#[test]
fn zero_trials_is_a_config_error() {
    let mut cfg = small(0.02, &[]);
    cfg.measure.trials = 0;
    let err = run_measure(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn unit_delta_always_localizes() {
    let mut cfg = small(0.04, &[523, 1239]);
    cfg.delta = 1.0;
    cfg.t_end = Some(50.0);
    let r = run_simulate(&cfg).unwrap();
    assert_eq!(r.aggregate["accepted"], 2.0);
    assert_eq!(r.aggregate["success_fraction"], 1.0);
    assert!(r.pass);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn linear_ensemble_does_at_least_as_well() {
    // the two ensembles have different ε, hence different accepted seeds
    let fx = common::fixtures();
    let seeds: Vec<u64> = [0.02, 0.04].iter().flat_map(|&e| fx.set(e).accepted.iter().take(6).map(|a| a.seed)).collect();
    let mut nonlinear = small(0.04, &seeds);
    nonlinear.eps1 = 0.02;
    nonlinear.eps2 = 0.02;
    nonlinear.t_end = Some(100.0);
    let linear = ExperimentConfig { eps2: 0.0, ..nonlinear.clone() };
    let (a, b) = (run_simulate(&linear).unwrap(), run_simulate(&nonlinear).unwrap());
    assert!(a.aggregate["accepted"] > 0.0 && b.aggregate["accepted"] > 0.0, "{:?} {:?}", a.outcomes[0].status, b.aggregate);
    assert!(a.aggregate["success_fraction"] >= b.aggregate["success_fraction"]);
}

#[test]
fn one_point_sweep_is_the_direct_run() {
    let mut cfg = small(0.02, &[0, 63]);
    cfg.t_end = Some(10.0);
    cfg.grid = vec![GridPoint { eps1: 0.01, eps2: 0.01, order: 2.0 }];
    let sweep = run_sweep(&cfg).unwrap();
    let direct = run_simulate(&ExperimentConfig { grid: Vec::new(), ..cfg.clone() }).unwrap().erase();
    let point = sweep.outcomes[0].report.clone().unwrap();
    assert_eq!(point.outcomes, direct.outcomes);
    assert_eq!(point.aggregate, direct.aggregate);
    assert_eq!(point.pass, direct.pass);
    assert_eq!(sweep.pass, direct.pass);
}

#[test]
fn sweep_isolates_failing_points_and_ignores_order() {
    let mut cfg = small(0.02, &[0]);
    cfg.sweep_mode = Some(Mode::Verify);
    let good = GridPoint { eps1: 0.01, eps2: 0.01, order: 2.0 };
    let bad = GridPoint { eps1: 0.01, eps2: 0.01, order: 0.5 };
    cfg.grid = vec![good, bad];
    let fwd = run_sweep(&cfg).unwrap();
    cfg.grid = vec![bad, good];
    let rev = run_sweep(&cfg).unwrap();
    assert!(fwd.outcomes[1].error.is_some() && fwd.outcomes[1].report.is_none());
    assert_eq!(fwd.outcomes[0].report, rev.outcomes[1].report);
    let point = fwd.outcomes[0].report.as_ref().unwrap();
    assert_eq!(point.outcomes[0]["status"], "accepted");
    assert!(!fwd.pass);
    let rows = sweep_rows(&fwd);
    assert!(rows.iter().filter(|r| r.point == 0).all(|r| r.order == 2.0 && r.metric != "error"));
    assert!(rows.iter().any(|r| r.point == 0 && r.metric == "pass"));
    let failed: Vec<_> = rows.iter().filter(|r| r.point == 1).collect();
    assert!(failed.len() == 1 && failed[0].metric == "error");
}

#[test]
fn uncoupled_verify_passes() {
    let mut cfg = small(0.02, &[0, 1, 2]);
    cfg.eps1 = 0.0;
    cfg.eps2 = 0.0;
    let r = run_verify(&cfg).unwrap();
    assert!(r.pass);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn verify_writes_one_certificate_per_accepted_seed() {
    let cfg = small(0.02, &[0, 1, 63]);
    let r = run_verify(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_verify(dir.path(), &r).unwrap();
    let f = files(dir.path());
    assert!(f.contains_key("certificates/seed_0.json") && f.contains_key("certificates/seed_63.json"));
    let cert: serde_json::Value = serde_json::from_slice(&f["certificates/seed_0.json"]).unwrap();
    assert_eq!(cert["config"]["eps"], serde_json::json!(0.02));
    assert!(cert["certificate"]["barrier"]["max_band_coeff"].as_f64().unwrap() < 0.02f64.powi(2));
}
