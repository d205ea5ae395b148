use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tensor_extremal::BitTensor;

const BIN: &str = env!("CARGO_BIN_EXE_tensor-extremal");
const IDENTITY2: &str = r#"{"t":2,"shape":[2,2],"ones":[[0,0],[1,1]]}"#;
const STAIRCASE: &str = r#"{"t":2,"shape":[3,3],"ones":[[0,0],[0,1],[1,1],[1,2],[2,2]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("TENSOR_EXTREMAL_CAP_CELLS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn file(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_identity() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let v = json(&run(&["classify", "-i", s(&id)]));
    assert_eq!(v["valid"], true);
    assert_eq!(v["free"], true);
    assert_eq!(v["permutation"], true);
    assert_eq!(v["latin"], true);
    assert_eq!(v["sunflower_core"], serde_json::json!([]));
}

#[test]
fn alpha_and_klazar_examples() {
    let v = json(&run(&["alpha", "--t", "2", "--k", "2"]));
    assert_eq!(v["alpha"], 192);
    let v = json(&run(&["alpha", "--t", "3", "--k", "2"]));
    assert_eq!(v["alpha"], "3206175793348609/534362651099136");
    assert_eq!(v["recursion"]["exceeds_half"], true);

    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "identity2.json", IDENTITY2);
    let v = json(&run(&["klazar", "--n", "1", "--pattern", s(&id)]));
    assert_eq!(v["lhs"], 12);
    assert_eq!(v["rhs"], 30);
    assert_eq!(v["holds"], true);
}

#[test]
fn contains_divisions_and_shadow() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let st = file(dir.path(), "st.json", STAIRCASE);
    let v = json(&run(&["contains", "--matrix", s(&st), "-p", s(&id)]));
    assert_eq!(v["contains"], true);
    assert_eq!(v["witness"], serde_json::json!([[0, 1], [0, 1]]));

    let anti = file(dir.path(), "anti.json", r#"{"t":2,"shape":[2,2],"ones":[[0,1],[1,0]]}"#);
    let v = json(&run(&["contains", "-i", s(&anti), "-p", s(&id)]));
    assert_eq!(v["contains"], false);
    assert_eq!(v["witness"], Value::Null);

    let full = file(dir.path(), "full.json", r#"{"t":2,"shape":[2,2],"ones":[[0,0],[0,1],[1,0],[1,1]]}"#);
    let v = json(&run(&["divisions", "-i", s(&full), "--k", "2", "--find-full"]));
    assert_eq!(v["count"], 1);
    assert_eq!(v["full_found"], true);
    assert_eq!(v["division"], serde_json::json!([[1], [1]]));

    let latin = file(
        dir.path(),
        "latin.json",
        r#"{"t":3,"shape":[2,2,2],"ones":[[0,0,0],[0,1,1],[1,0,1],[1,1,0]]}"#,
    );
    let v = json(&run(&["shadow", "--matrix", s(&latin)]));
    assert_eq!(v["face_counts"], serde_json::json!([6, 12, 4]));
    assert_eq!(v["corollary_holds"], true);
    let v = json(&run(&["shadow", "--cascade", "12", "2", "3"]));
    assert_eq!(v["terms"], serde_json::json!([[2, 6]]));
    assert_eq!(v["bound"], 8);
}

#[test]
fn extremal_count_and_latin() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let v = json(&run(&["extremal", "--n", "4", "-p", s(&id)]));
    assert_eq!(v["value"], 7);
    assert_eq!(v["exact"], true);
    let w = BitTensor::from_json_str(&v["witness"].to_string()).unwrap();
    assert_eq!(w.ones_count(), 7);

    let v = json(&run(&["count", "--n", "2", "-p", s(&id)]));
    assert_eq!(v["count"], 12);

    let v = json(&run(&["latin", "--n", "3", "--t", "3"]));
    assert_eq!(v["count"], 12);
}

#[test]
fn emitted_tensors_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let out = dir.path().join("report.json");
    let status = run(&["extremal", "--n", "3", "-p", s(&id), "-o", s(&out)]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let text = v["witness"].to_string();
    let w = BitTensor::from_json_str(&text).unwrap();
    let reparsed: Value = serde_json::from_str(&w.to_json_string()).unwrap();
    assert_eq!(reparsed, v["witness"]);
    let again = file(dir.path(), "w.json", &text);
    let v = json(&run(&["contains", "-i", s(&again), "-p", s(&id)]));
    assert_eq!(v["contains"], false);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let a = run(&["extremal", "--n", "4", "-p", s(&id), "--threads", "1"]);
    let b = run(&["extremal", "--n", "4", "-p", s(&id), "--threads", "3"]);
    let mut va = json(&a);
    let mut vb = json(&b);
    // Node counts depend on scheduling; value and witness do not.
    va["nodes_explored"] = Value::Null;
    vb["nodes_explored"] = Value::Null;
    assert_eq!(va, vb);

    let args = ["verify-suite", "--quick", "--only", "containment-equivalence,shadow", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(json(&first)["seed"], 7);
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let out = run(&["--format", "csv", "count", "--n", "2", "-p", s(&id)]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "count,n,t\n12,2,2\n");

    let out = run(&["verify-suite", "--quick", "--only", "constants", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header = rows.headers().unwrap().clone();
    assert!(header.iter().any(|h| h == "passed"));
    assert_eq!(rows.records().count(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let row = file(dir.path(), "row.json", r#"{"t":2,"shape":[1,2],"ones":[[0,0],[0,1]]}"#);
    let broken = file(dir.path(), "broken.json", "{");

    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["alpha", "--t", "2"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "-i", s(&dir.path().join("missing.json"))]).status.code(), Some(2));
    assert_eq!(run(&["contains", "-i", s(&id), "-p", s(&broken)]).status.code(), Some(2));
    assert_eq!(run(&["count", "--n", "2", "-p", s(&row)]).status.code(), Some(2));
    assert_eq!(run(&["verify-suite", "--only", "nonsense"]).status.code(), Some(2));

    let out = run(&["extremal", "--n", "6", "-p", s(&id)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap-cells"));
    assert_eq!(run(&["latin", "--n", "7", "--t", "2"]).status.code(), Some(3));
    let big = file(dir.path(), "big.json", r#"{"t":2,"shape":[4,4],"ones":[[0,3],[1,2],[2,1],[3,0]]}"#);
    assert_eq!(run(&["contains", "-i", s(&big), "-p", s(&id), "--budget", "1"]).status.code(), Some(3));

    // A truncated extremal search still reports its best lower bound.
    let v = json(&run(&["extremal", "--n", "4", "-p", s(&id), "--budget", "3"]));
    assert_eq!(v["exact"], false);
}

#[test]
fn raised_cap_warns() {
    let dir = tempfile::tempdir().unwrap();
    let id = file(dir.path(), "id.json", IDENTITY2);
    let out = Command::new(BIN)
        .args(["extremal", "--n", "2", "-p", s(&id)])
        .env("TENSOR_EXTREMAL_CAP_CELLS", "30")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn mutation_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let cx = dir.path().join("cx");
    let out = run(&[
        "verify-suite",
        "--quick",
        "--only",
        "shadow",
        "--mutate",
        "flip-shadow-bound",
        "--counterexample-dir",
        s(&cx),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    let files = v["counterexample_files"].as_array().unwrap();
    assert!(!files.is_empty());
    for f in files {
        let text = std::fs::read_to_string(f.as_str().unwrap()).unwrap();
        BitTensor::from_json_str(&text).unwrap();
    }
}
