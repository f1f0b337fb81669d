use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qdrift-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Data rows of a CSV table, split into cells.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# qdrift-lab v"));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qdrift-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn estimate_paper_ising_six_spins() {
    let out = run(&["estimate", "--model", "tfim", "--spins", "6", "--t", "4", "--epsilon", "1e-6", "--convention", "paper-ising"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().ends_with("schema=estimate convention=paper-ising"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(
        header,
        ["t", "gamma", "omega", "r_old", "r_new", "r_corollary", "applications_old", "applications_new", "ratio"]
    );
    assert_eq!(rows, vec![vec!["4", "10.6", "4", "28764160000", "2713600000", "678400000", "28764160000", "28764160000", "10.6"]]);
}

#[test]
fn estimate_raw_trivial_case() {
    let (_, rows) = csv_rows(&stdout(&run(&["estimate", "--gamma", "1", "--omega", "2", "--t", "1", "--epsilon", "1"])));
    assert_eq!(rows[0][3], "4");
    assert_eq!(rows[0][5], "4");
}

#[test]
fn estimate_raw_sweep_keeps_ratio() {
    let doc = json(&["estimate", "--gamma", "300", "--omega", "2", "--t-min", "1", "--t-max", "1e6", "--points", "7", "--epsilon", "1e-3"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    for row in rows {
        assert_eq!(row["ratio"].as_f64(), Some(300.0));
    }
    assert_eq!(rows[6]["t"].as_f64(), Some(1e6));
}

#[test]
fn raw_mode_without_gamma_is_a_usage_error() {
    assert_eq!(run(&["estimate", "--model", "raw", "--t", "1"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", "--t", "1", "--t-min", "1", "--t-max", "2"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", "--convention", "loose"]).status.code(), Some(2));
    assert_eq!(run(&["estimate", "--spins", "3"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn verify_two_spins_passes() {
    let out = run(&["verify", "--model", "tfim", "--spins", "2", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["steps", "lhs_lower", "lhs_upper", "rhs_theorem", "per_step_lhs_lower", "per_step_rhs", "pass"]);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[6] == "true"));

    let doc = json(&["verify", "--model", "tfim", "--spins", "2", "--t", "0.5"]);
    let flags: Vec<bool> = doc["rows"].as_array().unwrap().iter().map(|r| r["pass"].as_bool().unwrap()).collect();
    assert_eq!(flags, vec![true; 4]);
    let csv_lhs: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let json_lhs: Vec<f64> = doc["rows"].as_array().unwrap().iter().map(|r| r["lhs_lower"].as_f64().unwrap()).collect();
    assert_eq!(csv_lhs, json_lhs);
}

#[test]
fn verify_single_term_is_exact() {
    let doc = json(&["verify", "--model", "single-term", "--t", "1.0"]);
    for row in doc["rows"].as_array().unwrap() {
        assert!(row["lhs_upper"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn verify_refuses_large_models() {
    let out = run(&["verify", "--model", "tfim", "--spins", "6", "--t", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size error"));
}

#[test]
fn sample_single_trajectory_is_a_channel() {
    let doc = json(&["sample", "--model", "tfim", "--spins", "2", "--t", "0.2", "--steps", "32", "--trajectories", "1"]);
    let row = &doc["rows"][0];
    assert_eq!(row["mean_is_cptp"], true);
    assert_eq!(row["seconds"], Value::Null);
}

#[test]
fn sample_output_is_deterministic() {
    let dir = scratch("sample");
    let args = ["sample", "--model", "two-term", "--t", "0.5", "--steps", "8,16", "--trajectories", "500", "--seed", "11"];
    let mut files = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("{k}.csv"));
        let mut full = args.to_vec();
        let p = path.to_string_lossy().into_owned();
        full.extend(["--output", p.as_str()]);
        assert!(run(&full).status.success());
        files.push(std::fs::read_to_string(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let (_, rows) = csv_rows(&files[0]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][4], "");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn encode_examples() {
    let doc = json(&["encode", "--n", "100", "--dist", "uniform-pm1", "--seed", "1", "--t", "1", "--epsilon", "1e-7"]);
    let row = &doc["rows"][0];
    let gamma = row["gamma"].as_f64().unwrap();
    assert_eq!(row["ratio"].as_f64(), Some(gamma));
    assert!((40.0..60.0).contains(&gamma));

    let doc = json(&["encode", "--n", "1", "--dist", "uniform-01", "--seed", "1"]);
    assert_eq!(doc["rows"][0]["l"], 1);
    assert_eq!(doc["rows"][0]["n_terms"], 1);

    let out = run(&["encode", "--n", "4", "--exact-check", "--t", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).matches(" pass").count() == 4);
}

#[test]
fn encode_sweeps_dimensions() {
    let (_, rows) = csv_rows(&stdout(&run(&["encode", "--n", "4", "16", "64", "--t", "1", "--epsilon", "1e-7"])));
    let ls: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(ls, ["2", "4", "6"]);
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = scratch("config");
    let path = dir.join("run.json");
    std::fs::write(
        &path,
        r#"{"seed": 4, "estimate": {"spins": [6], "t": 4, "epsilon": 1e-6, "convention": "paper-ising"}}"#,
    )
    .unwrap();
    let p = path.to_string_lossy().into_owned();

    let doc = json(&["estimate", "--config", &p]);
    assert_eq!(doc["seed"], 4);
    assert_eq!(doc["rows"][0]["r_old"].to_string(), "28764160000");

    // explicit flags win
    let doc = json(&["estimate", "--config", &p, "--convention", "tight", "--seed", "9"]);
    assert_eq!(doc["convention"], "tight");
    assert_eq!(doc["seed"], 9);

    std::fs::write(&path, r#"{"estimate": {"spinz": [2]}}"#).unwrap();
    assert_eq!(run(&["estimate", "--config", &p]).status.code(), Some(2));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn help_lists_defaults() {
    let text = stdout(&run(&["verify", "--help"]));
    assert!(text.contains("[default: 4,16,64,256]"));
    assert!(text.contains("--seed"));
}
