use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinwigner")).args(args).output().unwrap()
}

fn run_into(args: &[&str], out: &Path) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    full.push("--out");
    full.push(out.to_str().unwrap());
    run(&full)
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn assert_checksums(dir: &Path) {
    let m = manifest(dir);
    let files = m["files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        let bytes = fs::read(dir.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(bytes.len() as u64, f["bytes"].as_u64().unwrap());
        assert_eq!(hex::encode(Sha256::digest(&bytes)), f["sha256"].as_str().unwrap());
    }
}

#[test]
fn phaseline_writes_series_and_features() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(
        &["phaseline", "--model", "xy", "--gamma", "0.5", "--param-start", "1.1", "--param-stop", "1.2", "--param-step", "0.005", "--labels", "1,12,tot"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("phaseline.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "param,label,value,energy,degeneracy,parity,gap");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 21 * 3);
    for l in ["1", "12", "tot"] {
        assert_eq!(rows.iter().filter(|r| r[1] == l).count(), 21);
    }
    assert!(dir.path().join("derivative.csv").exists());
    let critical: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("criticalpoints.json")).unwrap()).unwrap();
    let points = critical["critical_points"].as_array().unwrap();
    assert!(points.iter().any(|p| p["kind"] == "parity_crossing"
        && (p["location"].as_f64().unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-7));
    assert!(points.iter().any(|p| p["kind"] == "jump" && p["label"] == "tot"));
    for l in ["1", "12", "tot"] {
        assert!(points.iter().any(|p| p["label"] == l && (p["location"].as_f64().unwrap() - 1.1525).abs() <= 0.005), "{l}");
    }
    assert_checksums(dir.path());
}

#[test]
fn sphere_grid_has_requested_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(
        &["sphere", "--model", "xxz", "--param", "1", "--labels", "12", "--grid-theta", "19", "--grid-phi", "36"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sphere_12.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 19 * 36);
    let first: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    // Heisenberg point, pole value of the nearest-neighbour pair
    assert!((first[2] - (1.0 - 13f64.sqrt()) / 12.0).abs() < 1e-12, "{}", first[2]);
    assert_eq!(manifest(dir.path())["ground_state"]["degeneracy"], 1);
    assert_checksums(dir.path());
}

#[test]
fn animate_writes_monotone_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(
        &["animate", "--model", "ti", "--param-start", "0", "--param-stop", "2", "--param-step", "0.5", "--labels", "1", "--grid-theta", "5", "--grid-phi", "8"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let index = fs::read_to_string(dir.path().join("index.csv")).unwrap();
    let params: Vec<f64> =
        index.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(params, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    for k in 0..5 {
        assert!(dir.path().join(format!("frame_{k:04}/sphere_1.csv")).exists());
    }
    assert_checksums(dir.path());
}

#[test]
fn formulas_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["formulas", "--values", "0,1", "--gammas", "0.5", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let fact = fs::read_to_string(dir.path().join("factorization.csv")).unwrap();
    let row = fact.lines().nth(1).unwrap();
    let lambda_f: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((lambda_f - 2.0 / 3f64.sqrt()).abs() < 1e-12, "{row}");
    assert!(dir.path().join("formulas.csv").exists());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "model = xy\ngamma = 0.8\nparam_start = 1.0\nparam-stop = 1.1\nparam_step = 0.05\nlabels = 1\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run_into(&["phaseline", "--config", cfg.to_str().unwrap(), "--gamma", "0.5"], &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&out_dir);
    assert_eq!(m["config"]["gamma"], 0.5);
    assert_eq!(m["config"]["param_stop"], 1.1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_gamma = run_into(&["phaseline", "--model", "xy", "--gamma", "2"], dir.path());
    assert_eq!(bad_gamma.status.code(), Some(2));
    let foreign = run_into(&["phaseline", "--model", "ti", "--j", "1"], dir.path());
    assert_eq!(foreign.status.code(), Some(2));
    let bad_label = run_into(&["sphere", "--model", "ti", "--labels", "17"], dir.path());
    assert_eq!(bad_label.status.code(), Some(2));
    let policy = run_into(&["sphere", "--model", "ti", "--policy", "aligned-up"], dir.path());
    assert_eq!(policy.status.code(), Some(3));
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let io = run_into(&["sphere", "--model", "ti", "--labels", "1", "--grid-theta", "3", "--grid-phi", "4"], &blocker.join("sub"));
    assert_eq!(io.status.code(), Some(4));
}
