//! Black-box tests of the command-line binary: exit codes, JSON shape, and
//! end-to-end determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphdist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_stdout(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("valid JSON on stdout")
}

fn write_set(dir: &tempfile::TempDir, name: &str, graphs: &[Vec<Vec<f64>>]) -> PathBuf {
    let path = dir.path().join(name);
    let m = graphs[0].len();
    let body = serde_json::json!({
        "m": m,
        "graphs": graphs
            .iter()
            .enumerate()
            .map(|(k, adj)| serde_json::json!({"id": format!("g{k}"), "adjacency": adj}))
            .collect::<Vec<_>>(),
    });
    std::fs::write(&path, serde_json::to_string(&body).unwrap()).unwrap();
    path
}

fn p3() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 1.0],
        vec![0.0, 1.0, 0.0],
    ]
}

fn k3() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 1.0, 1.0],
        vec![1.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ]
}

#[test]
fn dist_identical_graphs_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), p3()]);
    let output = run(&["dist", "--input", path.to_str().unwrap(), "--pair", "0,1"]);
    let json = json_stdout(&output);
    assert_eq!(json["schema"], 1);
    assert_eq!(json["value"], 0.0);
}

#[test]
fn dist_p3_k3_is_sqrt_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), k3()]);
    let output = run(&["dist", "--input", path.to_str().unwrap(), "--pair", "0,1"]);
    let json = json_stdout(&output);
    let value = json["value"].as_f64().unwrap();
    assert!((value - 2.0_f64.sqrt()).abs() < 1e-12);
}

#[test]
fn dist_out_of_range_index_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), k3()]);
    let output = run(&["dist", "--input", path.to_str().unwrap(), "--pair", "0,7"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn dist_missing_file_exits_2() {
    let output = run(&["dist", "--input", "/nonexistent/set.json", "--pair", "0,1"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn multidist_fermat_spectral_identical_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[k3(), k3(), k3()]);
    let output = run(&[
        "multidist",
        "--input",
        path.to_str().unwrap(),
        "--method",
        "fermat-spectral",
    ]);
    let json = json_stdout(&output);
    assert!(json["value"].as_f64().unwrap() <= 1e-10);
    assert_eq!(json["witness"]["kind"], "center");
}

#[test]
fn multidist_relaxed_below_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), k3()]);
    let scg = json_stdout(&run(&[
        "multidist",
        "--input",
        path.to_str().unwrap(),
        "--method",
        "scg",
        "--tol",
        "1e-6",
    ]));
    let exact = json_stdout(&run(&[
        "multidist",
        "--input",
        path.to_str().unwrap(),
        "--method",
        "galign-bruteforce",
    ]));
    let scg_value = scg["value"].as_f64().unwrap();
    let exact_value = exact["value"].as_f64().unwrap();
    assert!(scg_value <= exact_value + 1e-5);
    assert!(scg["diagnostics"]["converged"].as_bool().unwrap());
}

#[test]
fn props_trials_zero_is_empty_report() {
    let output = run(&[
        "props",
        "--method",
        "galign-spectral",
        "--n",
        "3",
        "--m",
        "4",
        "--trials",
        "0",
    ]);
    let json = json_stdout(&output);
    assert_eq!(json["report"]["trials"], 0);
    assert_eq!(json["report"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn props_spectral_suite_is_clean() {
    let output = run(&[
        "props",
        "--method",
        "galign-spectral",
        "--n",
        "3",
        "--m",
        "4",
        "--trials",
        "50",
        "--seed",
        "3",
    ]);
    let json = json_stdout(&output);
    assert_eq!(json["report"]["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn cprop_reports_ratio_at_most_one() {
    let output = run(&[
        "cprop",
        "--method",
        "fermat-spectral",
        "--n",
        "3",
        "--m",
        "4",
        "--trials",
        "50",
    ]);
    let json = json_stdout(&output);
    assert!(json["estimate"]["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-8);
}

#[test]
fn diameter_exhaustive_budget_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), k3(), p3()]);
    let output = run(&[
        "diameter",
        "--input",
        path.to_str().unwrap(),
        "--budget",
        "100",
    ]);
    let json = json_stdout(&output);
    assert_eq!(json["estimate"]["ratio"], 1.0);
}

#[test]
fn gen_emits_loadable_set() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("generated.json");
    let output = run(&[
        "gen",
        "--model",
        "erdos-renyi",
        "--m",
        "6",
        "--count",
        "4",
        "--params",
        "p=0.4",
        "--seed",
        "9",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let gs = graphdist::graphs::load_graph_set(&out).unwrap();
    assert_eq!(gs.len(), 4);
    assert_eq!(gs.node_count(), 6);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), k3()]);
    let args = [
        "multidist",
        "--input",
        path.to_str().unwrap(),
        "--method",
        "scg",
        "--seed",
        "5",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn unknown_method_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_set(&dir, "set.json", &[p3(), k3()]);
    let output = run(&[
        "multidist",
        "--input",
        path.to_str().unwrap(),
        "--method",
        "mystery",
    ]);
    assert_eq!(output.status.code(), Some(2));
}
