use std::path::Path;
use std::process::Command;

fn dnls() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dnls"));
    c.env_remove("OUT_DIR").env_remove("THREADS");
    c
}

fn write_config(dir: &Path, json: &str) -> std::path::PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, json).unwrap();
    p
}

// seeds 0 and 63 are accepted at ε = 0.02 (window 64)
const BASE: &str = r#""eps1": 0.01, "eps2": 0.01, "N": 32, "jbar0": 64, "L": 256, "sensitivity": false, "conjugacy_states": 2"#;

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn passing_simulate_exits_zero_and_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{{BASE}, "seeds": [0, 63], "delta": 1.0, "T": 5.0}}"#));
    let out = dir.path().join("out");
    let status = dnls().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["config"]["eps"], 0.02);
    assert_eq!(r["config"]["N"], 32);
    assert!(out.join("series/seed_63.csv").exists());
}

#[test]
fn localization_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{{BASE}, "seeds": [0], "delta": 1e-60, "T": 5.0}}"#));
    let out = dir.path().join("out");
    let status = dnls().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
}

#[test]
fn edge_mass_abort_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{{BASE}, "seeds": [0], "T": 5.0, "edge_limit": 1e-300}}"#));
    let out = dir.path().join("out");
    let status = dnls().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(3));
    assert_eq!(report(&out)["aborted"], true);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad = write_config(dir.path(), r#"{"eps1": 0.01, "unknown_field": 3}"#);
    for args in [
        vec!["simulate", "--config", bad.to_str().unwrap()],
        vec!["verify", "--config", "/nonexistent/config.json"],
    ] {
        let status = dnls().args(&args).arg("--out").arg(&out).status().unwrap();
        assert_eq!(status.code(), Some(2), "{args:?}");
    }
    let good = dir.path().join("good.json");
    std::fs::write(&good, format!("{{{BASE}}}")).unwrap();
    let status = dnls().args(["measure", "--config"]).arg(&good).arg("--out").arg(&out).args(["--seed-range", "5..2"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::write(&good, format!(r#"{{{BASE}, "measure": {{"trials": 0}}}}"#)).unwrap();
    let status = dnls().args(["measure", "--config"]).arg(&good).arg("--out").arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = dnls().args(["simulate", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2), "missing --config");
}

#[test]
fn environment_supplies_out_dir_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{{{}}}", BASE.replace("0.01", "0.0")));
    let out = dir.path().join("from_env");
    let status = dnls()
        .args(["verify", "--config"])
        .arg(&cfg)
        .args(["--seed-range", "3..5"])
        .env("OUT_DIR", &out)
        .env("THREADS", "1")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["seeds"], "3..5");
    assert_eq!(r["outcomes"].as_array().unwrap().len(), 2);
}
