use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdspec")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn duality_is_valid() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "duality.qddc", "(true^<p>^true) <=> !([[!p]])");
    let o = run(&["check-valid", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn invalid_formula_exits_one_with_counterexample() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.qddc", "[[p]]");
    let o = run(&["check-valid", &f]);
    assert_eq!(code(&o), 1);
    assert!(!stdout(&o).is_empty());
}

#[test]
fn unsatisfiable_and_equivalent() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.qddc", "[[p]] && true^<!p>^true");
    assert_eq!(code(&run(&["check-sat", &f])), 1);
    let a = write(&dir, "a.qddc", "!(true^<p>^true)");
    let b = write(&dir, "b.qddc", "[[!p]]");
    assert_eq!(code(&run(&["check-equiv", &a, &b])), 0);
}

#[test]
fn minepump_synthesizes_a_controller() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("mp.json");
    let o = run(&["synth", fixture("minepump.spec").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(c.get("transitions").is_some());

    let dot = run(&["emit", "--format", "dot", out.to_str().unwrap()]);
    assert_eq!(code(&dot), 0);
    assert!(stdout(&dot).contains("digraph"));
}

#[test]
fn arbiter_with_short_deadtime_fails_model_check() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(fixture("arbiter.spec")).unwrap();
    let spec = write(&dir, "a.spec", &text.replace("dead = 3", "dead = 2"));
    let model = fixture("arbiter.model.json");
    let o = run(&["model-check", model.to_str().unwrap(), &spec]);
    assert_eq!(code(&o), 1);
    assert!(!stdout(&o).is_empty());
}

#[test]
fn diagram_translates_through_every_stage() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.td", "p: 0a:1|b:x; q: 2|a:0|; @sync:(a, b, [1,2]);");
    let o = run(&["translate", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for k in ["timing_diagram", "xi", "secenl", "qddc"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!(code(&run(&["render-wavedrom", &f])), 0);
}

#[test]
fn errors_and_limits() {
    let o = run(&["--json-errors", "check-sat", "/nonexistent/f.qddc"]);
    assert_eq!(code(&o), 2);
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(e.get("error").is_some() && e.get("message").is_some());

    assert_eq!(code(&run(&["frobnicate"])), 2);

    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.qddc", "[[p && ]]");
    assert_eq!(code(&run(&["check-sat", &bad])), 2);

    let o = run(&["--cap", "5", "compile", fixture("minepump.spec").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn random_traces_are_seeded() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.qddc", "[[p => q]]");
    let a = run(&["--seed", "7", "check-trace", &f, "--random", "5", "--length", "6"]);
    let b = run(&["--seed", "7", "check-trace", &f, "--random", "5", "--length", "6"]);
    assert_eq!(stdout(&a), stdout(&b));
}
