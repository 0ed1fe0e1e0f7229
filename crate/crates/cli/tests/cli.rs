use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kneser_morse_core::complex::{neighborhood_complex, DEFAULT_FACE_CAP};
use kneser_morse_core::io::write_face_list;
use kneser_morse_core::kneser::{kneser_graph, GroundParam};
use serde_json::Value;
use tempfile::TempDir;

fn mk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mk")).args(args).env_remove("MK_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn gen_s_graph_at_k0_has_one_edge() {
    let o = mk(&["gen", "--k", "0", "--family", "s"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k=0\n1,3 2,4\n");
}

#[test]
fn gen_complex_matches_library() {
    let o = mk(&["gen", "--k", "1", "--family", "kneser", "--complex"]);
    assert_eq!(o.status.code(), Some(0));
    let g = kneser_graph(GroundParam::new(1).unwrap());
    let faces = neighborhood_complex(&g).unwrap().enumerate_faces(true, DEFAULT_FACE_CAP).unwrap();
    assert_eq!(stdout(&o), write_face_list(g.universe(), "N(KG)", &faces));
}

#[test]
fn negative_k_is_a_usage_error() {
    assert_eq!(mk(&["gen", "--k", "-1", "--family", "s"]).status.code(), Some(4));
    assert_eq!(mk(&["gen", "--k", "1", "--family", "petersen"]).status.code(), Some(4));
    assert_eq!(mk(&["frobnicate"]).status.code(), Some(4));
    assert_eq!(mk(&["--help"]).status.code(), Some(0));
    assert_eq!(mk(&["--version"]).status.code(), Some(0));
}

#[test]
fn betti_of_generated_complexes() {
    let dir = TempDir::new().unwrap();
    let kg = dir.path().join("kg2.txt");
    let o = mk(&["gen", "--k", "2", "--family", "kneser", "--complex", "--out", s(&kg)]);
    assert_eq!(o.status.code(), Some(0));
    for ring in ["gf2", "z"] {
        let o = mk(&["betti", s(&kg), "--ring", ring, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert_eq!(v["reduced"], serde_json::json!([0, 0, 19]));
        assert_eq!(v["torsion"], serde_json::json!([[], [], []]));
    }

    let ns = dir.path().join("s1.txt");
    mk(&["gen", "--k", "1", "--family", "s", "--complex", "--out", s(&ns)]);
    let v = json(&mk(&["betti", s(&ns), "--format", "json"]));
    assert_eq!(v["reduced"], serde_json::json!([0, 1]));
    assert_eq!(v["ring"], "gf2");
}

#[test]
fn betti_rejects_empty_and_missing_files() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.txt", "");
    let o = mk(&["betti", s(&empty)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(mk(&["betti", s(&dir.path().join("nope.txt"))]).status.code(), Some(4));
}

#[test]
fn verify_matching_examples() {
    let dir = TempDir::new().unwrap();
    // Boundary of the triangle on 1,2 / 3,4 / 1,3 with the cyclic matching.
    let tri = write(&dir, "tri.txt", "k=1 complex=triangle\n1,2\n3,4\n1,3\n1,2 3,4\n3,4 1,3\n1,2 1,3\n");
    let cyclic = write(
        &dir,
        "cyc.json",
        r#"[{"d":"1,2","u":"1,2 3,4"},{"d":"3,4","u":"3,4 1,3"},{"d":"1,3","u":"1,2 1,3"}]"#,
    );
    let o = mk(&["verify-matching", s(&tri), s(&cyclic), "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["acyclic"], false);
    assert_eq!(v["cycle"].as_array().unwrap().len(), 6);

    let kg0 = dir.path().join("kg0.txt");
    mk(&["gen", "--k", "0", "--family", "kneser", "--complex", "--out", s(&kg0)]);
    let none = write(&dir, "none.json", "[]");
    let o = mk(&["verify-matching", s(&kg0), s(&none), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["acyclic"], true);
    assert_eq!(v["total_faces"], 7);
    assert_eq!(v["critical_total"], 7);

    let twice = write(&dir, "twice.json", r#"[{"d":"1,2","u":"1,2 3,4"},{"d":"1,2","u":"1,2 1,3"}]"#);
    assert_eq!(mk(&["verify-matching", s(&tri), s(&twice)]).status.code(), Some(2));
}

#[test]
fn collapse_filtration_and_face_list() {
    let o = mk(&["collapse", "--k", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["betti_preserved"], true);
    assert_eq!(v["residual_is_n_sg"], true);

    let dir = TempDir::new().unwrap();
    // A solid edge collapses onto one endpoint.
    let edge = write(&dir, "edge.txt", "k=1 complex=edge\n-\n1,2\n3,4\n1,2 3,4\n");
    let m = write(&dir, "m.json", r#"[{"d":"3,4","u":"1,2 3,4"}]"#);
    let o = mk(&["collapse", "--faces", s(&edge), "--matching", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k=1 complex=edge-collapsed\n-\n1,2\n");
    assert_eq!(mk(&["collapse", "--faces", s(&edge)]).status.code(), Some(4));
}

#[test]
fn certify_small_k_and_cap() {
    for k in ["0", "1"] {
        let o = mk(&["certify", "--k", k, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert_eq!(json(&o)["pass"], true);
    }
    let v = json(&mk(&["certify", "--k", "1", "--format", "json"]));
    let kg = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "N(KG): reduced Betti over GF(2)").unwrap();
    assert_eq!(kg["computed"]["reduced"], serde_json::json!([0, 11]));

    assert_eq!(mk(&["certify", "--k", "1", "--cap", "5"]).status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_mk")).args(["certify", "--k", "1"]).env("MK_CAP", "5").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn certify_k3() {
    let o = mk(&["certify", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains(r#"computed {"reduced":[0,0,0,29]"#));
}

#[test]
fn reports_are_deterministic() {
    let a = mk(&["certify", "--k", "2", "--format", "json"]);
    let b = mk(&["certify", "--k", "2", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}
