use std::process::Command;

use serde_json::Value;

fn conetorsion(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_conetorsion")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = conetorsion(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn disc_and_cone_agree() {
    let disc = json(&["torsion", "disc", "--nu", "2", "--radius", "1"]);
    let cone = json(&["torsion", "cone", "--base", "s1", "--scale", "2"]);
    let d = disc["log_torsion"].as_f64().unwrap() - cone["log_torsion"].as_f64().unwrap();
    assert!(d.abs() < 1e-10);
}

#[test]
fn unit_disc_prints_seventeen_digits() {
    let (code, out, _) = conetorsion(&["torsion", "disc", "--nu", "1", "--radius", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("\"log_torsion\":-1.0723649429247"), "{out}");
}

#[test]
fn skewed_torus_lattice() {
    let v = json(&["torsion", "cone", "--base", "torus2", "--scale", "3", "--lattice", "6.2,0,1.5,5.8"]);
    assert_eq!(v["parity"], "odd");
    assert!(v["error_estimate"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn custom_base_round_trip() {
    // circle of scale 2 written out as a truncated spectrum file
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circle.json");
    let eig: Vec<String> = (1..=4000).map(|k| format!("{{\"value\": {}, \"mult\": 2}}", 4 * k * k)).collect();
    let text = format!(
        "{{\"dim\": 1, \"betti\": [1, 1], \"scale\": 2, \"degrees\": [{{\"k\": 0, \"eigenvalues\": [{}], \"heat_coeffs\": [{}, -1]}}]}}",
        eig.join(","),
        std::f64::consts::PI.sqrt() / 2.0
    );
    std::fs::write(&path, text).unwrap();
    let base = format!("custom:{}", path.display());
    let (code, out, err) = conetorsion(&["--tol", "1e-6", "torsion", "cone", "--base", &base]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let want = json(&["torsion", "disc", "--nu", "2", "--radius", "1"])["log_torsion"].as_f64().unwrap();
    assert!((v["log_torsion"].as_f64().unwrap() - want).abs() < 1e-5, "{out}");
}

#[test]
fn exit_codes() {
    let (code, _, err) = conetorsion(&["torsion", "cone", "--base", "torus2", "--scale", "0.9"]);
    assert_eq!(code, 2);
    assert!(err.contains("scaling assumption"));
    assert_eq!(conetorsion(&["zeros", "--kind", "mixed", "--nu", "1", "--alpha", "3", "--count", "2"]).0, 2);
    assert_eq!(conetorsion(&["--tol", "1", "selftest"]).0, 2);
}

#[test]
fn selftest_passes_quickly_at_loose_tolerance() {
    let (code, out, _) = conetorsion(&["--tol", "1e-4", "selftest"]);
    assert_eq!(code, 0, "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 10);
}
