use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn presets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn diamond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diamond"))
        .args(args)
        .env_remove("DIAMOND_JOBS")
        .output()
        .unwrap()
}

fn preset_file(name: &str) -> String {
    presets()
        .join(format!("{name}.toml"))
        .to_string_lossy()
        .into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "{e}: {}{}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect()
}

#[test]
fn check_exit_codes() {
    let ok = diamond(&["check", &preset_file("coxeter-s3")]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["ambiguities_checked"], 5);
    assert_eq!(v["bergman"], true);

    let bad = diamond(&["check", &preset_file("coxeter-s4-naive")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(strings(&json(&bad)["unresolvable"]).contains(&"(stsu, sts, su)"));

    let dir = std::env::temp_dir().join(format!("diamond-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let broken = dir.join("broken.toml");
    std::fs::write(
        &broken,
        "version = 1\nname = \"x\"\nkind = \"hecke\"\ncolors = [\n",
    )
    .unwrap();
    let err = diamond(&["check", broken.to_str().unwrap()]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).starts_with("error:"));
    assert_eq!(
        diamond(&["check", "/nonexistent/x.toml"]).status.code(),
        Some(2)
    );
    assert_eq!(diamond(&["check"]).status.code(), Some(2));
}

#[test]
fn hecke_presets_check() {
    for name in ["coxeter", "nilhecke", "webster-sl2-skeleton"] {
        let o = diamond(&["check", "--preset", name]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(json(&o)["bergman_type"], true);
    }
    let o = diamond(&["check", &preset_file("modified-symmetric")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn conditions() {
    for name in ["coxeter-s3", "nilhecke"] {
        let o = diamond(&["conditions", "--preset", name]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert!(v["generators"].as_array().unwrap().is_empty(), "{name}");
    }
    let v = json(&diamond(&[
        "conditions",
        &preset_file("modified-symmetric"),
    ]));
    assert_eq!(strings(&v["reduced"]), ["a", "b", "c + d", "e"]);
    let gens = strings(&v["generators"]);
    assert!(gens.contains(&"2*a") && gens.contains(&"2*b"));
}

#[test]
fn basis_listings() {
    let v = json(&diamond(&["basis", "--preset", "coxeter-s3"]));
    assert_eq!(v["count"], 6);
    assert_eq!(v["complete"], true);

    let v = json(&diamond(&[
        "basis", "--preset", "nilhecke", "--source", "i,i",
    ]));
    assert_eq!(strings(&v["basis"]), ["ε", "s"]);

    let v = json(&diamond(&[
        "basis",
        "--preset",
        "webster-sl2-skeleton",
        "--source",
        "b,r",
        "--target",
        "r,r",
    ]));
    assert_eq!(v["count"], 0);

    let refused = diamond(&["basis", "--preset", "s3-bad"]);
    assert_eq!(refused.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("--force"));
    let forced = diamond(&["basis", "--preset", "s3-bad", "--force"]);
    assert_eq!(forced.status.code(), Some(0));
    assert_eq!(json(&forced)["certified"], false);
}

#[test]
fn normal_forms_and_completion() {
    let v = json(&diamond(&[
        "normal-form",
        "--preset",
        "coxeter-s3",
        "--term",
        "stst - 2*ts",
    ]));
    assert_eq!(v["normal_form"], "-ts");

    let v = json(&diamond(&[
        "normal-form",
        "--preset",
        "nilhecke",
        "--source",
        "i,i",
        "--term",
        "s{x[1]}",
        "--trace",
    ]));
    assert_eq!(v["normal_form"], "x[2]·s + 1");
    assert!(!v["trace"].as_array().unwrap().is_empty());

    let o = diamond(&["complete", "--preset", "s3-bad"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["status"], "confluent");
    assert_eq!(
        diamond(&["complete", "--preset", "nilhecke"]).status.code(),
        Some(2)
    );
}

#[test]
fn ms_commands() {
    let v = json(&diamond(&["ms", "order", "tst", "sts"]));
    assert_eq!(v["comparison"], "LT");
    let v = json(&diamond(&["ms", "order", "sts", "tst"]));
    assert_eq!(v["comparison"], "GT");

    let v = json(&diamond(&["ms", "sink", "ss"]));
    assert_eq!(v["length"], 0);
    assert_eq!(v["sink"], "ε");

    let o = diamond(&["ms", "graph", "--w", "4321", "--quotient", "--orient"]);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    let vertices: Vec<&str> = dot
        .lines()
        .filter(|l| l.contains("[label=") && !l.contains("->"))
        .collect();
    assert_eq!(vertices.len(), 8);
    // a unique vertex without outgoing arrows
    let sinks = (0..8)
        .filter(|k| !dot.contains(&format!("  v{k} ->")))
        .count();
    assert_eq!(sinks, 1);

    let v = json(&diamond(&["ms", "flip", "sts"]));
    assert_eq!(v["result"], "tst");
    assert_eq!(v["delta"], "added");
    let v = json(&diamond(&["ms", "flip", "tst", "--at", "0"]));
    assert_eq!(v["delta"], "removed");

    assert_eq!(diamond(&["ms", "sink", "s?"]).status.code(), Some(2));
    assert_eq!(diamond(&["ms", "flip", "ss"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["check", "--preset", "modified-symmetric", "--jobs", "3"],
        vec!["conditions", "--preset", "modified-symmetric"],
        vec!["check", "--preset", "coxeter-s4-naive", "--trace"],
    ] {
        let a = diamond(&args);
        let b = diamond(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(!a.stdout.is_empty());
    }
}
