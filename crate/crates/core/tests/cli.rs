//! End-to-end runs of the `affine-orth` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-orth"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn quasi_metric_json_reports_euler_integral() {
    let out = run(&["verify", "quasi-metric", "--k", "1", "--grid", "64", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["overall"], true);
    let v = doc["observables"][0]["euler_integral"].as_f64().unwrap();
    assert!((v + 39.47841760435743).abs() < 1e-9);
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"euler_integral\""));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "theorem1", "--t", "1.5"][..],
        &["verify", "unknown"],
        &["verify", "hopf", "--dim", "0"],
        &["verify", "quasi-metric", "--grid", "2"],
        &["verify", "hopf", "--tol-scale", "0"],
        &["verify", "hopf", "--format", "yaml"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn single_scenarios_pass() {
    for s in ["hopf", "torus-flat", "local-frame", "quasi-metric", "gauss-bonnet"] {
        let out = run(&["verify", s, "--seed", "7"]);
        assert_eq!(out.status.code(), Some(0), "{s}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn failing_checks_exit_1_and_name_the_failure() {
    let out = run(&["verify", "torus-flat", "--k", "0.5,0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["overall"], false);
    assert_eq!(doc["first_failure"]["check"], "min_spectral_gap");
}

#[test]
fn text_and_json_report_the_same_residuals() {
    let text = run(&["verify", "hopf", "--dim", "3", "--seed", "4"]);
    let doc = json(&run(&["verify", "hopf", "--dim", "3", "--seed", "4", "--format", "json"]));
    let text = String::from_utf8(text.stdout).unwrap();
    for c in doc["checks"].as_array().unwrap() {
        let r = c["residual"].as_f64().unwrap();
        let line = text
            .lines()
            .find(|l| l.split_whitespace().nth(1) == c["name"].as_str())
            .unwrap();
        assert!(line.contains(&format!("residual {r:?} ")), "{line}");
    }
}

#[test]
fn output_file_receives_the_report() {
    let dir = std::env::temp_dir().join(format!("affine-orth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&["verify", "local-frame", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["scenario"], "local-frame");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn all_emits_sorted_array_and_reruns_identically() {
    let a = run(&["verify", "all", "--seed", "7", "--format", "json"]);
    let b = run(&["verify", "all", "--seed", "7", "--format", "json"]);
    let (mut da, mut db) = (json(&a), json(&b));
    let names: Vec<_> = da.as_array().unwrap().iter().map(|r| r["scenario"].as_str().unwrap().to_string()).collect();
    assert_eq!(names, ["gauss-bonnet", "hopf", "local-frame", "quasi-metric", "theorem1", "torus-flat"]);
    for d in [&mut da, &mut db] {
        for r in d.as_array_mut().unwrap() {
            r["runtime_ms"] = Value::from(0.0);
        }
    }
    assert_eq!(da, db);
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&da).unwrap()).unwrap();
    assert_eq!(reparsed, da);
}

#[test]
fn negative_k_values_parse() {
    let out = run(&["verify", "torus-flat", "--k", "-1,2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["parameters"]["k"], serde_json::json!([-1.0, 2.0]));
}
