use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqc"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("hqc runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const GATE1: &str = r#"{"gate": "gate1", "phase_target": 0.7853981633974483, "omega": "50 fs", "t_ad": "7.5 ps"}"#;

#[test]
fn run_writes_all_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g1.json", GATE1);
    let out = tmp.path().join("out");
    let o = hqc(&["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["trace.csv", "report.json", "schedule.csv", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let report = read_json(&out.join("report.json"));
    assert!(report["fidelity"].as_f64().unwrap() >= 0.99);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["tool"], "hqc");
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    // Defaults are echoed with their resolved values.
    let config = &manifest["config"];
    assert_eq!(config["loop"]["ramp"], "smooth_step");
    assert_eq!(config["loop"]["n_samples"], 10_000);
    assert_eq!(config["dt"].as_f64().unwrap(), 0.75);
    assert!((config["omega"].as_f64().unwrap() - 0.02).abs() < 1e-12);
    assert_eq!(config["t_ad"].as_f64().unwrap(), 7500.0);
    assert_eq!(config["initial_state"], "Eplus");
}

#[test]
fn overrides_apply() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g1.json", GATE1);
    let out = tmp.path().join("o");
    let o = hqc(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
        "--dt",
        "0.5",
        "--samples",
        "2000",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["dt"].as_f64().unwrap(), 0.5);
    assert_eq!(manifest["config"]["loop"]["n_samples"], 2000);
    let schedule = fs::read_to_string(out.join("schedule.csv")).unwrap();
    assert_eq!(schedule.lines().count(), 2001);
}

#[test]
fn config_errors_exit_2_with_key_path() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"gate": "gate1", "phase_target": 0.5, "omega": "50 fs", "t_ad": "7.5 ps", "loop": {"rampp": "linear"}}"#,
    );
    let o = hqc(&["run", cfg.to_str().unwrap(), "--output-dir", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("loop.rampp"), "{}", stderr(&o));

    let cfg = write_config(tmp.path(), "unit.json", r#"{"gate": "gate1", "phase_target": 0.5, "omega": "50 fs", "t_ad": "7.5 weeks"}"#);
    let o = hqc(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t_ad"));

    let o = hqc(&["run", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn short_two_qubit_time_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "tq.json",
        r#"{"gate": "twoqubit", "omega": "1 meV", "delta": "5 meV", "t_ad": "10 ps"}"#,
    );
    let out = tmp.path().join("out");
    let o = hqc(&["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("violates T_ad"), "{}", stderr(&o));
    assert!(!out.join("report.json").exists());
}

#[test]
fn oversized_step_exits_2() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g1.json", GATE1);
    let o = hqc(&["run", cfg.to_str().unwrap(), "--output-dir", tmp.path().to_str().unwrap(), "--dt", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g1.json", GATE1);
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = hqc(&["run", cfg.to_str().unwrap(), "--output-dir", blocker.join("sub").to_str().unwrap(), "--samples", "500"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn holonomy_command_reports_phase() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g1.json", GATE1);
    let out = tmp.path().join("h");
    let o = hqc(&["holonomy", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_json(&out.join("report.json"));
    assert!((r["phase"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-3);
    assert!((r["solid_angle"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
    assert!(r["predicted_distance"].as_f64().unwrap() < 1e-6);
    assert!(!out.join("trace.csv").exists());
}

#[test]
fn reversed_holonomy_is_conjugate() {
    let tmp = TempDir::new().unwrap();
    let unitary = |reversed: bool| {
        let cfg = write_config(
            tmp.path(),
            "h.json",
            &format!(r#"{{"gate": "holonomy", "map": "gate1", "loop": {{"theta_max": 1.1, "phi_sweep": 2.3, "reversed": {reversed}}}}}"#),
        );
        let out = tmp.path().join(format!("h{reversed}"));
        let o = hqc(&["holonomy", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        read_json(&out.join("report.json"))["wilson_line"]["unitary"].clone()
    };
    let (fwd, rev) = (unitary(false), unitary(true));
    for i in 0..2 {
        for j in 0..2 {
            let a = &fwd[i][j];
            let b = &rev[i][j];
            assert!((a[0].as_f64().unwrap() - b[0].as_f64().unwrap()).abs() < 1e-6);
            assert!((a[1].as_f64().unwrap() + b[1].as_f64().unwrap()).abs() < 1e-6);
        }
    }
}

#[test]
fn scan_writes_monotone_summary() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "scan.json",
        r#"{"gate": "scan", "phase_target": 1.5707963267948966, "omega": "50 fs", "t_ad": "7.5 ps",
            "scan": {"gate": "gate2", "parameter": "t_ad", "values": ["7.5 ps", "15 ps", "30 ps", "60 ps"]}}"#,
    );
    let out = tmp.path().join("s");
    let o = hqc(&["scan", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "holonomy_distance").unwrap();
    let d: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(d.len(), 4);
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    for k in 0..4 {
        assert!(out.join(format!("entry_{k:03}")).join("report.json").is_file());
    }
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["entries"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["parameter"], "t_ad");
}

#[test]
fn scan_command_needs_scan_config() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "g1.json", GATE1);
    let o = hqc(&["scan", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
