use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn vaxfront(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vaxfront"))
        .args(args)
        .env_remove("VAXFRONT_THREADS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn cycle() -> String {
    models().join("cycle12.json").display().to_string()
}

#[test]
fn compute_full_and_one_in_four() {
    let out = vaxfront(&["compute", "--model", &cycle(), "--eta", "1,1,1,1,1,1,1,1,1,1,1,1"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert!((v["re"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["cost"].as_f64().unwrap(), 0.0);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["resolution"], 64);

    let out = vaxfront(&["compute", "--model", &cycle(), "--eta", "1,1,1,0,1,1,1,0,1,1,1,0"]);
    let v = json_of(&out);
    assert!((v["re"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert!((v["cost"].as_f64().unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn compute_reads_strategy_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("eta.json");
    std::fs::write(&p, "[1,1,1,0,1,1,1,0,1,1,1,0]").unwrap();
    let out = vaxfront(&["compute", "--model", &cycle(), "--eta-file", p.to_str().unwrap()]);
    assert!(out.status.success());
    assert!((json_of(&out)["re"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn input_errors_exit_two() {
    let out = vaxfront(&["compute", "--model", &cycle(), "--eta", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = vaxfront(&["compute", "--model", &cycle(), "--eta", "1,1,1,1,1,1,1,1,1,1,1,2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = vaxfront(&["compute", "--model", "/nonexistent.json", "--eta", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"weights":[0.5,0.5],"matrix":[[1,-1],[0,1]]}"#).unwrap();
    let out = vaxfront(&["decompose", "--model", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = vaxfront(&["cstar", "--model", &cycle(), "--cost", "affine:1,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_vaxfront"))
        .args(["compute", "--model", &cycle(), "--eta", "1,1,1,1,1,1,1,1,1,1,1,1"])
        .env("VAXFRONT_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_vaxfront"))
        .args(["compute", "--model", &cycle(), "--eta", "1,1,1,1,1,1,1,1,1,1,1,1"])
        .env("VAXFRONT_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn cstar_on_cycle_and_two_blocks() {
    let v = json_of(&vaxfront(&["cstar", "--model", &cycle()]));
    assert_eq!(v["cstar"].as_f64().unwrap(), 0.5);
    assert_eq!(v["set"], serde_json::json!([0, 2, 4, 6, 8, 10]));
    assert_eq!(v["c_anti"].as_f64().unwrap(), 0.0);

    let two = models().join("two_block.json");
    let v = json_of(&vaxfront(&["cstar", "--model", two.to_str().unwrap()]));
    assert_eq!(v["c_anti"].as_f64().unwrap(), 0.5);
    assert_eq!(v["cstar"].as_f64().unwrap(), 1.0);
}

#[test]
fn decompose_and_classify() {
    let two = models().join("two_block.json");
    let v = json_of(&vaxfront(&["decompose", "--model", two.to_str().unwrap()]));
    assert_eq!(v["decomposition"]["atoms"], serde_json::json!([[0], [1]]));
    assert_eq!(v["classification"]["irreducible"], false);

    let cc = models().join("counter_convex.json");
    let v = json_of(&vaxfront(&["classify", "--model", cc.to_str().unwrap(), "--trials", "400"]));
    assert_eq!(v["convexity"]["verdict"], "Indeterminate");
    assert!(v["probe"]["convexity_violation"]["gap"].as_f64().unwrap() > 0.0);
    assert!(v["probe"]["concavity_violation"]["gap"].as_f64().unwrap() < 0.0);
}

#[test]
fn grid_model_input() {
    let g = models().join("grid_6xy.json");
    let eta = vec!["1"; 50].join(",");
    let v = json_of(&vaxfront(&["compute", "--model", g.to_str().unwrap(), "--eta", &eta]));
    assert!((v["r0"].as_f64().unwrap() - 2.0).abs() <= 10.0 / 50.0);
}

#[test]
fn frontier_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let status = vaxfront(&[
        "frontier", "--model", &cycle(), "--resolution", "4", "--kind", "pareto", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# seed=0 resolution=4"));
    assert_eq!(lines.next().unwrap(), "cost,loss,strategy");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][..2], ["0", "2"]);
    assert_eq!(rows[4][..2], ["0.5", "0"]);
    assert_eq!(rows[2][0], "0.25");
    let at_quarter: f64 = rows[2][1].parse().unwrap();
    assert!(at_quarter < 2f64.sqrt());
    assert!(rows.iter().all(|r| r[2].split(';').count() == 12));
}

#[test]
fn plot_data_and_sample() {
    let two = models().join("two_block.json");
    let two = two.to_str().unwrap();
    let v = json_of(&vaxfront(&["frontier", "--model", two, "--resolution", "4", "--plot-data", "--samples", "50"]));
    assert_eq!(v["resolution"], 4);
    assert!(v["feasible"].as_array().unwrap().len() >= 50);
    assert_eq!(v["anti"]["critical_cost"].as_f64().unwrap(), 0.5);
    assert!(v["pareto"]["points"].as_array().unwrap().len() == 5);

    let v = json_of(&vaxfront(&["sample", "--model", two, "--samples", "20", "--seed", "9"]));
    assert_eq!(v["seed"], 9);
    assert!(v["points"].as_array().unwrap().len() >= 20);
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["frontier", "--model", &cycle(), "--resolution", "4", "--kind", "both", "--seed", "3"];
    let a = vaxfront(&args);
    let b = vaxfront(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap() == "cost,loss,strategy,kind");
}

#[test]
fn verify_paper_subset_and_self_test() {
    let out = vaxfront(&["verify-paper", "--only", "eigen"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 1);
    assert!(!text.contains("FAIL ["));

    let out = vaxfront(&["verify-paper", "--only", "eigen,cycle", "--perturbed"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("FAIL")).count(), 2);

    let out = vaxfront(&["verify-paper", "--only", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));

    let out = vaxfront(&["verify-paper", "--only", "cycle", "--json"]);
    let v = json_of(&out);
    assert_eq!(v["criteria"][0]["pass"], true);
}
