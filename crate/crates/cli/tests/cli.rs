use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const O28: &str = "generators: x, y, z\nrelators: x^5, y^2, z^2, (x*z)^3, (x*y)^2, (y*z^-1)^2\n";
const O34: &str = "generators: x, y, z\nrelators: x^2, y^3, z^2, (z*y)^2, (y*x*z)^2, (y*x*z*x)^3\n";
const O28_TRIPLE: &str = "u=x*y*z^-1*x^-1; ul=x*z*x^-1; ur=x*z";
const O34B_TRIPLE: &str = "v=x^-1; vl=y^-1*z^-1; vr=z^-1*x^-1*y^-1*x";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_msgraphs"));
    for var in [
        "MSG_ATLAS",
        "MSG_BUDGET",
        "MSG_CAP",
        "MSG_TIMEOUT",
        "MSG_JOBS",
        "MSG_FORMAT",
    ] {
        c.env_remove(var);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn tables_genus_11() {
    let o = run(&["tables", "--genus", "11", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "m_11=120"));
    let j = json(&run(&["tables", "--genus", "2"]));
    assert_eq!(j["m_g"], 12);
    assert_eq!(j["M_g"], 12);
    assert_eq!(j["Mstar_g"], 24);
}

#[test]
fn tables_rejects_small_genus() {
    assert_eq!(run(&["tables", "--genus", "1"]).status.code(), Some(3));
}

#[test]
fn build_piped_into_invariants() {
    let built = run(&["build", "O34.a'"]);
    assert_eq!(built.status.code(), Some(0));
    let doc = json(&built);
    assert_eq!(doc["genus"], 11);
    assert_eq!(doc["order"], 120);
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 50);
    let mut child = bin()
        .args(["invariants", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(&built.stdout)
        .unwrap();
    let inv: Value = serde_json::from_slice(&child.wait_with_output().unwrap().stdout).unwrap();
    assert_eq!(inv["diameter"], 10);
    assert_eq!(inv["girth"], 12);
    assert_eq!(inv["edges"], 60);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["build", "O20C.a"][..],
        &["verify-atlas", "--id", "O22B"],
        &["project", "cube"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn order_and_index() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "o28.txt", O28);
    let o = run(&["order", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["order"], 120);
    let o = run(&["order", &f, "--subgroup", "x", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "index 24");
}

#[test]
fn order_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(
        run(&["order", &missing.display().to_string()])
            .status
            .code(),
        Some(3)
    );
    let f = write(&dir, "o28.txt", O28);
    assert_eq!(run(&["order", &f, "--budget", "10"]).status.code(), Some(2));
    let o = bin()
        .args(["order", &f])
        .env("MSG_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let bad = write(&dir, "bad.txt", "generators: x\nrelators: x^\n");
    assert_eq!(run(&["order", &bad]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["tables"]).status.code(), Some(3));
    assert_eq!(
        run(&["--budget", "0", "tables", "--genus", "3"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["build", "O99.a"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_hom_printed_map_and_mutation() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (write(&dir, "o28.txt", O28), write(&dir, "o34.txt", O34));
    let o = run(&[
        "check-hom",
        &a,
        &b,
        "--map",
        O28_TRIPLE,
        "--images",
        O34B_TRIPLE,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["verdict"], "isomorphism");
    assert_eq!(j["source_order"], 120);
    assert_eq!(j["target_order"], 120);

    let swapped = "v=x^-1; vl=z^-1*x^-1*y^-1*x; vr=y^-1*z^-1";
    let o = run(&[
        "check-hom",
        &a,
        &b,
        "--map",
        O28_TRIPLE,
        "--images",
        swapped,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdict"], "undefined");

    let o = run(&[
        "check-hom",
        &a,
        &b,
        "--map",
        "u=y",
        "--images",
        "v=x",
        "--format",
        "text",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("homomorphism"));

    let o = run(&["check-hom", &a, &b, "--map", "u=y", "--images", "v=x;vl=y"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_atlas_report() {
    let o = run(&["verify-atlas"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["summary"]["flagged"], 2);
    assert_eq!(j["summary"]["failed"], 0);
    assert_eq!(j["equivalences"].as_array().unwrap().len(), 4);

    let o = run(&["verify-atlas", "--id", "O34", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("VERIFIED  O34.a'(11)"));
    assert!(text.contains("FLAGGED   O28.d(21,k) / O34.c(21,k)"));
    assert_eq!(run(&["verify-atlas", "--id", "O77"]).status.code(), Some(3));
}

#[test]
fn atlas_override() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", "{ not json");
    assert_eq!(
        run(&["--atlas", &broken, "verify-atlas"]).status.code(),
        Some(3)
    );

    let mut atlas: Value = serde_json::from_str(msgraphs::atlas::EMBEDDED_ATLAS).unwrap();
    for o in atlas["orbifolds"].as_array_mut().unwrap() {
        if o["id"] == "O34" {
            o["order"] = 60.into();
        }
    }
    let wrong = write(&dir, "wrong.json", &atlas.to_string());
    let o = bin()
        .args(["verify-atlas", "--id", "O34"])
        .env("MSG_ATLAS", &wrong)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin()
        .args(["build", "O34.a'"])
        .env("MSG_ATLAS", &wrong)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn lemma44_small_groups() {
    let o = run(&["lemma44", "a5z2"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["order"], 120);
    assert_eq!(j["all_equivalent"], true);
    assert_eq!(
        run(&["lemma44", "ixo", "--cap", "100"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["lemma44", "s5"]).status.code(), Some(3));
}

#[test]
fn project_writes_scene_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("scene.json");
    let o = run(&[
        "--jobs",
        "2",
        "project",
        "tesseract",
        "-o",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let scene: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(scene["vertices"].as_array().unwrap().len(), 16);
    assert_eq!(scene["polylines"].as_array().unwrap().len(), 32);
    assert_eq!(scene["meta"]["samples_per_edge"], 16);

    let obj = dir.path().join("scene.obj");
    run(&[
        "project",
        "simplex4",
        "--samples",
        "8",
        "-o",
        &obj.display().to_string(),
    ]);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("l ")).count(), 10);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("v ")).count(),
        5 + 10 * 8
    );

    assert_eq!(
        run(&["project", "cube", "--samples", "2"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["project", "klein-bottle"]).status.code(), Some(3));
}

#[test]
fn project_graph_with_embedding() {
    let dir = TempDir::new().unwrap();
    let doc = r#"{"vertices": 3, "edges": [[0,1],[1,2],[2,0]],
        "embedding": [[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#;
    let f = write(&dir, "tri.json", doc);
    let o = run(&["project", &f, "--pole", "1,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    let scene = json(&o);
    assert_eq!(scene["polylines"].as_array().unwrap().len(), 3);
    assert_eq!(scene["vertices"][0], serde_json::json!([1.0, 0.0, 0.0]));

    let o = run(&["project", &f, "--pole", "0,1,0,0"]);
    assert_eq!(o.status.code(), Some(3));
    let short = write(
        &dir,
        "short.json",
        r#"{"vertices": 3, "edges": [[0,1]], "embedding": [[1,0,0,0]]}"#,
    );
    assert_eq!(run(&["project", &short]).status.code(), Some(3));
    assert!(Path::new(&f).exists());
}
