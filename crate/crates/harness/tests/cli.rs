use std::path::Path;
use std::process::Command;

use cmabt_harness::{run_experiment, ExperimentConfig};

fn offcmab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_offcmab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_RUN: &str = r#"{"env":{"type":"cascading","m":10,"k":3,"instance_seed":4},
  "algorithms":["clcb","cucb-offline","emp"],"n_values":[16,64],"trials":4,"base_seed":9,"output":"out/rows.csv"}"#;

#[test]
fn gap_command_examples() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "c.json", r#"{"type":"cascading","mu":[0.9,0.1,0.5],"k":2}"#);
    let act = write(dir.path(), "a.json", r#"{"kind":"list","members":[0,1]}"#);
    let out = offcmab(&["gap", &inst, &act]);
    assert!(out.status.success());
    let g: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((g - 0.04).abs() < 1e-12);

    let inst = write(dir.path(), "k.json", r#"{"type":"cache","p":[0.5,0.5],"c":[1.0,0.2],"k":1}"#);
    let act = write(dir.path(), "m.json", r#"{"kind":"set","members":[1]}"#);
    let out = offcmab(&["gap", &inst, &act]);
    let g: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    assert!((g - 0.4).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"env":{"type":"cascading","m":4,"k":2},"algorithms":["lfu"],"n_values":[4]}"#);
    assert_eq!(offcmab(&["run", &bad]).status.code(), Some(2));
    assert_eq!(offcmab(&["run", "/nonexistent/config.json"]).status.code(), Some(2));
    let inst = write(dir.path(), "k.json", r#"{"type":"cache","p":[0.5,0.5],"c":[1.0,0.2],"k":1}"#);
    let act = write(dir.path(), "m.json", r#"{"kind":"set","members":[0,1]}"#);
    assert_eq!(offcmab(&["gap", &inst, &act]).status.code(), Some(2));
    // unwritable output is a runtime failure
    let ok = write(dir.path(), "ok.json", SMALL_RUN);
    let blocker = write(dir.path(), "blocker", "");
    let out = format!("{blocker}/rows.csv");
    assert_eq!(offcmab(&["run", &ok, "--out", &out]).status.code(), Some(3));
}

#[test]
fn run_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL_RUN);
    let out = offcmab(&["run", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/rows.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("env,alg,n,trial,seed,gap,ms"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3 * 2 * 4);

    // summary means and sample deviations recompute from the rows
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/rows.summary.json")).unwrap()).unwrap();
    for e in summary["entries"].as_array().unwrap() {
        let gaps: Vec<f64> = rows
            .iter()
            .filter(|r| r[1] == e["alg"].as_str().unwrap() && r[2].parse::<u64>().ok() == e["n"].as_u64())
            .map(|r| r[5].parse().unwrap())
            .collect();
        assert_eq!(gaps.len(), 4);
        let mean = gaps.iter().sum::<f64>() / 4.0;
        let sd = (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / 3.0).sqrt();
        assert!((mean - e["mean_gap"].as_f64().unwrap()).abs() < 1e-12);
        assert!((sd - e["std_gap"].as_f64().unwrap()).abs() < 1e-12);
    }
    assert_eq!(summary["base_seed"], 9);
    assert!(summary["harness_version"].is_string());
}

#[test]
fn output_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", SMALL_RUN);
    let out = Command::new(env!("CARGO_BIN_EXE_offcmab"))
        .args(["run", &cfg])
        .env(cmabt_harness::OUTPUT_DIR_VAR, other.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(other.path().join("out/rows.csv").exists());
    assert!(!dir.path().join("out/rows.csv").exists());
}

#[test]
fn row_order_and_bytes_independent_of_threads() {
    let cfg = ExperimentConfig::from_json(SMALL_RUN).unwrap();
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = serial.install(|| run_experiment(&cfg).unwrap());
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(cmabt_harness::csv_string(&a.rows), cmabt_harness::csv_string(&b.rows));
}

#[test]
fn gen_dataset_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.json", r#"{"type":"cascading","m":6,"k":2,"instance_seed":1}"#);
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let o = offcmab(&["gen-dataset", &inst, "--n", "25", "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("3", "a.jsonl");
    assert_eq!(a.lines().count(), 25);
    assert_eq!(a, run("3", "b.jsonl"));
    assert_ne!(a, run("4", "c.jsonl"));
}

#[test]
fn coverage_and_online_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cov.json",
        r#"{"env":{"type":"cache","m":100,"k":40,"instance_seed":1},"n_values":[100,1000],"horizon":30,"trials":2}"#,
    );
    let out = offcmab(&["coverage", &cfg, "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["report"]["c_one"].as_f64().unwrap() - 160.0).abs() < 1e-9);
    assert_eq!(v["bounds"].as_array().unwrap().len(), 2);

    let csv = dir.path().join("online.csv");
    let out = offcmab(&["online", &cfg, "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 1 + 2 * 30);
}
