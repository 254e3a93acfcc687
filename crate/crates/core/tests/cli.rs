use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stabforge"));
    c.env_remove("STABFORGE_TRUNC");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stabforge-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cases: &[&[&str]] = &[
        &["stab", "--builtin", "tstar-pn", "--n", "3", "--format", "json"],
        &["resonance", "--builtin", "tstar-pn", "--n", "4", "--format", "json"],
        &["tessellate", "--weights", "2x,y,x-y", "--format", "svg"],
        &["floors", "--example", "mu2", "--format", "json"],
        &["theta-check", "--trunc", "12", "--format", "json"],
        &["nodal-limit", "--slope", "1/3", "--format", "json"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn stab_output_round_trips_through_verify() {
    let path = scratch("stab.json");
    let p = path.to_str().unwrap();
    let o = run(&["stab", "--builtin", "tstar-pn", "--n", "3", "--slope", "1/7", "--output", p]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["slope"], "1/7");
    let o = run(&["verify", "--stab", p, "--format", "json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let rep: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["pass"], true);

    // a tampered diagonal fails the check with its own exit code
    let mut bad = v.clone();
    let entries = bad["entries"].as_array_mut().unwrap();
    entries[1].as_array_mut().unwrap()[1] = Value::String("1".into());
    let bad_path = scratch("bad.json");
    fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = run(&["verify", "--stab", bad_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn resonance_prints_powers_of_h() {
    let o = run(&["resonance", "--builtin", "tstar-pn", "--n", "4"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v, serde_json::json!(["1", "h", "h^2", "h^3"]));
}

#[test]
fn schema_errors_carry_a_json_pointer() {
    let path = scratch("model.json");
    fs::write(
        &path,
        r#"{"torus": ["a1", "a2", "h"], "A": ["a1", "a2"],
            "fixed_points": [{"name": "F1", "tangent": 7}], "edges": []}"#,
    )
    .unwrap();
    let o = run(&["stab", "--model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("/fixed_points/0/tangent"), "{err}");
}

#[test]
fn invalid_invocations_fail_cleanly() {
    let o = run(&["stab", "--builtin", "p2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().starts_with("error:"));
    let o = run(&["nodal-limit", "--slope", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["stab", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--stab", "/nonexistent/stab.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn truncation_falls_back_to_the_environment() {
    let o = bin().args(["theta-check", "--format", "json"]).env("STABFORGE_TRUNC", "7").output().unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["truncation"], 7);
    let o = bin().args(["theta-check", "--trunc", "5", "--format", "json"]).env("STABFORGE_TRUNC", "7").output().unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["truncation"], 5);
}

#[test]
fn tessellate_writes_svg_and_csv() {
    let svg = scratch("tiles.svg");
    let o = run(&["tessellate", "--weights", "2x,y,x-y", "--svg", svg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    let fig = fs::read_to_string(&svg).unwrap();
    assert!(fig.starts_with("<svg") || fig.starts_with("<?xml"));
    assert!(fig.contains("<polygon"));
    assert!(stdout(&o).lines().count() > 1);
}
