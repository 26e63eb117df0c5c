use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmfield::generate::{random_mm_field, two_point_pair};
use mmfield::{io, MMField};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmfield"))
}

fn write(dir: &Path, name: &str, x: &MMField) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&io::mm_to_json(x)).unwrap()).unwrap();
    path
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn two_point_pair_at_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = two_point_pair();
    let (xp, yp) = (write(dir.path(), "x.json", &x), write(dir.path(), "y.json", &y));
    let out = bin().args(["dist", "gw"]).arg(&xp).arg(&yp).args(["--p", "inf"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["value"], 0.5);
    assert_eq!(v["status"], "exact");
}

#[test]
fn validate_reports_violations_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    // values 1.5 apart on points 1 apart
    std::fs::write(&bad, r#"{"n": 2, "metric": {"type": "euclidean", "dim": 1}, "d": [1.0], "values": [0.0, 1.5]}"#).unwrap();
    let out = bin().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"n": 2, "metric": {"type": "euclidean", "dim": 1}, "d": [1.0], "values": [0.0, 0.5]}"#).unwrap();
    let out = bin().arg("validate").arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["valid"], true);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bin().args(["dist", "gw"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("nonsense").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn exhausted_budget_exits_three_with_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let xp = write(dir.path(), "x.json", &random_mm_field(7, 2, 1, 1));
    let yp = write(dir.path(), "y.json", &random_mm_field(7, 2, 1, 2));
    let out = bin().args(["--budget", "1", "dist", "gh"]).arg(&xp).arg(&yp).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&out);
    assert_eq!(v["status"], "bounds_only");
    assert!(v["lower"]["value"].as_f64().unwrap() <= v["upper"]["value"].as_f64().unwrap());
}

#[test]
fn demo_writes_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.json");
    let status = bin().args(["demo", "fig2", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["inclusions"]["vr_rs_in_vr_r"], true);
    let svg = std::fs::read_to_string(out.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn seeds_change_sampled_output() {
    let dir = tempfile::tempdir().unwrap();
    let xp = write(dir.path(), "x.json", &random_mm_field(4, 2, 1, 1));
    let run = |seed: &str| {
        bin().args(["--seed", seed, "curvature", "sample"]).arg(&xp).args(["--n", "3", "--m", "5"]).output().unwrap().stdout
    };
    assert_eq!(run("1"), run("1"));
    assert_ne!(run("1"), run("2"));
}
