//! End-to-end tests of the command-line tool.

use std::process::{Command, Output};

use isectq::cli::CORPUS;
use serde_json::Value;

fn isectq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isectq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = isectq(&all);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn temp_file(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("isectq-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn classify_sigma_cp2() {
    let o = isectq(&["classify", "examples/sigma-cp2.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Neither (H^2(CP^2) = Q, no Lagrangian: rank 1)"), "{}", stdout(&o));
}

#[test]
fn truncate_s2xs3() {
    let v = json(&["truncate", "examples/s2xs3.json", "--k", "3"]);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 1]));
    let v = json(&["cotruncate", "s2xs3", "--k", "3"]);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 1, 0, 1]));
}

#[test]
fn thom_439_example() {
    let o = isectq(&["examples", "run", "thom-439"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Gram [[0,1],[1,0]]"), "{out}");
    assert!(out.contains("nonzero degrees: {0,4,6,7,9,13}"), "{out}");
}

#[test]
fn every_example_runs_clean() {
    for (name, _, _) in CORPUS {
        let o = isectq(&["examples", "run", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn exit_codes() {
    let o = isectq(&["dp", "sigma-cp2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("unsupported"));

    assert_eq!(isectq(&["dp", "sigma-t2"]).status.code(), Some(2));
    assert_eq!(isectq(&["cohomology", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(isectq(&["cohomology", &temp_file("bad.json", "{not json")]).status.code(), Some(1));
    assert_eq!(isectq(&["no-such-command"]).status.code(), Some(1));

    // d(x) = y and d(y) = z, so d(d(x)) != 0.
    let bad = r#"{"kind": "cdga", "top_degree": 3, "basis": [["1"], ["x"], ["y"], ["z"]],
        "differential": [[1, 0, 0, "1"], [2, 0, 0, "1"]], "products": []}"#;
    let o = isectq(&["validate", &temp_file("d2.json", bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("axiom"));
}

#[test]
fn json_models_round_trip() {
    let v = json(&["truncate", "nodal-link", "--k", "3"]);
    let path = temp_file("trunc.json", &v["model"].to_string());
    let w = json(&["cohomology", &path]);
    assert_eq!(w["betti"], v["betti"]);
    let v = json(&["isect", "sigma-cp3", "--perversity", "m", "--normal"]);
    let path = temp_file("isect.json", &v["model"].to_string());
    let w = json(&["cohomology", &path]);
    let n = v["betti"].as_array().unwrap().len();
    assert_eq!(w["betti"].as_array().unwrap()[..n], v["betti"].as_array().unwrap()[..]);
}

#[test]
fn witt_compare_and_thom() {
    let a = temp_file("f1.json", r#"{"kind": "form", "gram": [[1, 0], [0, -1]]}"#);
    let b = temp_file("f2.json", r#"{"kind": "form", "gram": [[0, 1], [1, 0]]}"#);
    let v = json(&["witt", "compare", &a, &b]);
    assert_eq!(v["equal"], Value::Bool(true));

    let s2 = temp_file("s2.json", r#"{"kind": "formal", "top_degree": 2, "basis": [["1"], [], ["x"]], "differential": [], "products": []}"#);
    let v = json(&["thom", "--base", &s2, "--euler", "x", "--rank", "2"]);
    assert_eq!(v["class"], Value::String("even-dim".into()));
    let v = json(&["thom", "--base", &s2, "--rank", "3"]);
    assert_eq!(v["class"], Value::String("l-space".into()));
    assert_eq!(isectq(&["thom", "--base", &s2, "--rank", "2"]).status.code(), Some(1));
}

#[test]
fn dp_report_for_witt_input() {
    let v = json(&["dp", "sigma-cp3", "--report"]);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 1, 1, 0, 0, 1]));
    assert_eq!(v["goodness"]["very_good"], Value::Bool(true));
}
