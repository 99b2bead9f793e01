use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wentzell-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn dtn_of_canonical_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dtn.json",
        r#"{"problem": {"kind": "interval", "beta": -1.0, "gamma": 0.0},
            "grid": {"nodes": 101},
            "command": {"name": "dtn"}}"#,
    );
    let out = dir.path().join("out");
    let o = lab(&["dtn", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("dtn.json"));
    assert_eq!(report["verdict"], "N/A");
    assert_eq!(report["tool"], "wentzell-lab");
    let expected = [[-1.0, 1.0], [1.0, -1.0]];
    for (i, row) in expected.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let got = report["payload"]["matrix"][i][j].as_f64().unwrap();
            assert!((got - e).abs() <= 1e-12, "N[{i}][{j}] = {got}");
        }
    }
}

#[test]
fn empty_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.json", "");
    let o = lab(&["sector", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`problem`"), "{err}");
}

#[test]
fn mismatched_subcommand_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"problem": {"kind": "interval"}, "grid": {"nodes": 21}, "command": {"name": "evolve"}}"#,
    );
    let o = lab(&["dtn", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn singular_boundary_operator_exits_numerical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "r.json",
        r#"{"problem": {"kind": "interval", "beta": -1.0, "gamma": 0.0},
            "grid": {"nodes": 51},
            "command": {"name": "resolvent-check", "lambdas": [0.0]}}"#,
    );
    let o = lab(&[
        "resolvent-check",
        "--config",
        &cfg,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("resolvent-check") && err.contains("0+0i"), "{err}");
}

#[test]
fn failing_bound_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d.json",
        r#"{"problem": {"kind": "disk", "beta": -1.0, "gamma": -1.0, "q": 0.0},
            "command": {"name": "disk"}}"#,
    );
    let out = dir.path().join("out");
    let o = lab(&["disk", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(read_json(&out.join("disk.json"))["verdict"], "FAIL");
}

#[test]
fn csv_tables_have_headers_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"problem": {"kind": "disk", "beta": -1.0, "q": 1.0, "max_mode": 16},
            "command": {"name": "sector", "operator": "dtn"}}"#,
    );
    let out = dir.path().join("out");
    let o = lab(&[
        "sector",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json,csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("ray_table.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta_rad,sup_norm,bounded_flag,argmax_r"));
    let report = read_json(&out.join("sector.json"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let theta: f64 = first[0].parse().unwrap();
    assert_eq!(theta, report["payload"]["ray_table"][0]["theta_rad"].as_f64().unwrap());
    assert_eq!(csv.lines().count(), 91);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"problem": {"kind": "interval", "beta": -1.0},
            "grid": {"nodes": 31},
            "command": {"name": "similarity-check", "samples": 2},
            "seed": 5}"#,
    );
    let out = dir.path().join("out");
    let o = lab(&[
        "similarity-check",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("similarity-check.json"));
    assert_eq!(report["seed"], 9);
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["payload"]["seed"], 9);
}
