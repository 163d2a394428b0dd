use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn multinv(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_multinv")).args(args).output().expect("binary runs");
    let code = out.status.code().expect("exited normally");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cayley(dir: &Path, diagram: &str) -> std::path::PathBuf {
    let file = dir.join(format!("{diagram}.json"));
    let (code, _) = multinv(&["cayley", "--diagram", diagram, "--out", path(&file)]);
    assert_eq!(code, 0);
    file
}

#[test]
fn cayley_graph_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = cayley(dir.path(), "B3");
    let g: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(g["n"], 24);
    assert_eq!(g["q"], 3);
    assert_eq!(g["colors"], serde_json::json!(["g0", "g1", "g2"]));
}

#[test]
fn checks_report_through_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a3 = cayley(dir.path(), "A3");
    let (code, out) = multinv(&["check", "--graph", path(&a3), "--property", "mirror"]);
    assert_eq!(code, 0);
    assert_eq!(out["recognition"]["outcome"], "coxeter");
    assert_eq!(out["recognition"]["diagram"], "A3");

    let (code, out) = multinv(&["check", "--graph", path(&a3), "--property", "property-p"]);
    assert_eq!(code, 1);
    assert_eq!(out["property_p"], false);

    let cube = cayley(dir.path(), "A1+A1+A1");
    let (code, _) = multinv(&["check", "--graph", path(&cube), "--property", "property-p"]);
    assert_eq!(code, 0);

    let (code, out) = multinv(&["check", "--graph", path(&a3), "--property", "geodesic", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out["geodesic"]["holds"], true);
}

#[test]
fn non_reflecting_graph_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    // K_{3,3} has no reflecting cut at all.
    let k33 = dir.path().join("k33.json");
    std::fs::write(
        &k33,
        r#"{"n":3,"q":3,"colors":["a","b","c"],"sigma":{"a":[0,1,2],"b":[1,2,0],"c":[2,0,1]}}"#,
    )
    .unwrap();
    let (code, out) = multinv(&["check", "--graph", path(&k33), "--property", "edge-reflecting"]);
    assert_eq!(code, 1);
    assert_eq!(out["edge_reflecting"], false);
    let (code, _) = multinv(&["certify", "--graph", path(&k33), "--method", "solve"]);
    assert_eq!(code, 1);
}

#[test]
fn certify_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let c8 = cayley(dir.path(), "I4");
    let certs = dir.path().join("certs.json");
    let (code, _) = multinv(&["certify", "--graph", path(&c8), "--method", "solve", "--out", path(&certs)]);
    assert_eq!(code, 0);
    let (code, out) = multinv(&["verify", "--graph", path(&c8), "--cert", path(&certs)]);
    assert_eq!(code, 0);
    assert_eq!(out["passed"], true);
    assert_eq!(out["certificates"].as_array().unwrap().len(), 2);

    let (code, out) = multinv(&["certify-vertex", "--graph", path(&c8), "--edge-certs", path(&certs)]);
    assert_eq!(code, 0);
    assert_eq!(out["report"]["passed"], true);

    let (code, out) = multinv(&["certify", "--graph", path(&c8), "--method", "construct"]);
    assert_eq!(code, 2);
    assert_eq!(out, Value::Null);
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = cayley(dir.path(), "A2");
    let certs = dir.path().join("certs.json");
    let (code, _) = multinv(&["certify", "--diagram", "A2", "--method", "construct", "--out", path(&certs)]);
    assert_eq!(code, 0);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&certs).unwrap()).unwrap();
    let first = &mut doc["colors"][0]["certificate"]["cuts"][0]["P"][0][0];
    *first = serde_json::json!(first.as_f64().unwrap() + 0.25);
    std::fs::write(&certs, serde_json::to_string(&doc).unwrap()).unwrap();
    let (code, out) = multinv(&["verify", "--graph", path(&a2), "--cert", path(&certs)]);
    assert_eq!(code, 1);
    assert_eq!(out["passed"], false);
}

#[test]
fn coset_and_vertex_certificates() {
    let (code, out) = multinv(&["coset", "--diagram", "B3", "--subgroup", "g1,g2"]);
    assert_eq!(code, 0);
    assert_eq!(out["coset_graph"]["vertices"], 6);
    assert_eq!(out["coset_graph"]["tag"], "orthoplex(3)");

    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("v.json");
    let (code, _) = multinv(&["certify-vertex", "--diagram", "B3", "--subgroup", "1,2", "--out", path(&cert)]);
    assert_eq!(code, 0);
    let (code, out) = multinv(&["verify", "--diagram", "B3", "--subgroup", "g1,g2", "--cert", path(&cert)]);
    assert_eq!(code, 0);
    assert_eq!(out["passed"], true);

    let (code, _) = multinv(&["coset", "--diagram", "B3", "--subgroup", "g0,g1,g2"]);
    assert_eq!(code, 2);
}

#[test]
fn eval_and_locc_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = cayley(dir.path(), "I3");
    let args = ["eval", "--graph", path(&c6), "--dims", "2,3", "--seed", "11"];
    let (code, a) = multinv(&args);
    assert_eq!(code, 0);
    let (_, b) = multinv(&args);
    assert_eq!(a, b);
    let nu = a["nu"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&nu));

    let args = ["locc-test", "--graph", path(&c6), "--dims", "2,2", "--trials", "16", "--seed", "2"];
    let (code, a) = multinv(&args);
    assert_eq!(code, 0);
    let (_, b) = multinv(&[&["--threads", "1"], &args[..]].concat());
    assert_eq!(a, b);
    assert!(a["min_gap"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn enumerate_counts_small_cases() {
    let (code, out) = multinv(&["enumerate", "--n", "2", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out["count"], 1);
    let (code, out) = multinv(&["enumerate", "--n", "4", "--q", "3", "--classify"]);
    assert_eq!(code, 0);
    let graphs = out["graphs"].as_array().unwrap();
    assert!(graphs.iter().any(|g| g["recognition"]["outcome"] == "coxeter"));
}
