//! End-to-end contract of the `bezred` binary: exit codes, determinism,
//! round trips, verify consistency, SVG output.

mod common;

use std::path::Path;
use std::process::{Command, Output};
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bezred"))
}

fn write_curve(path: &Path, json: &str) {
    std::fs::write(path, json).unwrap();
}

fn sample_json() -> String {
    // a degree-7 planar curve
    let pts = [
        [0.0, 0.0],
        [1.0, 3.0],
        [2.5, -1.0],
        [4.0, 2.0],
        [5.0, 5.0],
        [6.0, 1.0],
        [7.5, 2.0],
        [9.0, 0.0],
    ];
    format!(
        r#"{{"degree":7,"dimension":2,"points":{}}}"#,
        serde_json::to_string(&pts).unwrap()
    )
}

fn report_without_timings(stdout: &[u8]) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(stdout).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn reduce_success_and_determinism() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    write_curve(&input, &sample_json());
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    let run = |out: &Path| -> Output {
        bin()
            .args(["reduce", "--input"])
            .arg(&input)
            .args(["--degree", "5", "--mode", "g", "-k", "1", "-l", "1"])
            .arg("--output")
            .arg(out)
            .output()
            .unwrap()
    };
    let a = run(&out1);
    let b = run(&out2);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success());
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    assert_eq!(report_without_timings(&a.stdout), report_without_timings(&b.stdout));

    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(report["e2"].as_f64().unwrap() >= 0.0);
    assert_eq!(report["lambda"].as_array().unwrap().len(), 1);
    assert_eq!(report["mu"].as_array().unwrap().len(), 1);
}

#[test]
fn mode_ordering_through_cli() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    write_curve(&input, &sample_json());
    let e2_for = |mode: &str| -> f64 {
        let out = bin()
            .args(["reduce", "--input"])
            .arg(&input)
            .args(["--degree", "5", "--mode", mode, "-k", "1", "-l", "1"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["e2"].as_f64().unwrap()
    };
    assert!(e2_for("g") <= e2_for("c") + 1e-9);
}

#[test]
fn verify_matches_report() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    let reduced = dir.path().join("out.json");
    write_curve(&input, &sample_json());
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "5", "--mode", "cg", "-k", "1", "-l", "1"])
        .arg("--output")
        .arg(&reduced)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let ver = bin()
        .args(["verify", "--input"])
        .arg(&input)
        .arg("--against")
        .arg(&reduced)
        .output()
        .unwrap();
    assert!(ver.status.success());
    let vrep: serde_json::Value = serde_json::from_slice(&ver.stdout).unwrap();
    let e2_a = report["e2"].as_f64().unwrap();
    let e2_b = vrep["e2"].as_f64().unwrap();
    assert!((e2_a - e2_b).abs() <= 1e-12 * e2_a.max(1.0), "{e2_a} vs {e2_b}");
    let einf_a = report["einf"].as_f64().unwrap();
    let einf_b = vrep["einf"].as_f64().unwrap();
    assert!((einf_a - einf_b).abs() <= 1e-12 * einf_a.max(1.0));
}

#[test]
fn exit_code_validation_error() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    write_curve(&input, &sample_json());
    // k = 4 exceeds the supported order limit
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "5", "--mode", "c", "-k", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("-1..=3"), "{msg}");

    // n <= m
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "9", "--mode", "c"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n > m > 0"));

    // bad weight
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "5", "--mode", "c", "--alpha", "-1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha, beta > -1"));
}

#[test]
fn exit_code_io_error() {
    let dir = tempdir().unwrap();
    let out = bin()
        .args(["reduce", "--input"])
        .arg(dir.path().join("missing.json"))
        .args(["--degree", "5", "--mode", "c"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_code_numerical_failure() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    // coincident leading control points: zero start tangent makes the
    // hybrid linear system for lambda_1 singular
    write_curve(
        &input,
        r#"{"degree":4,"dimension":2,"points":[[0,0],[0,0],[2,1],[3,-1],[4,0]]}"#,
    );
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "3", "--mode", "cg", "-k", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn svg_emission() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    write_curve(&input, &sample_json());
    let svg = dir.path().join("plot.svg");
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "5", "--mode", "c", "-k", "0", "-l", "0"])
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("<svg").count(), 1);
    assert!(doc.trim_end().ends_with("</svg>"));
    // every opened polyline/circle element is self-closed
    assert_eq!(doc.matches("<polyline").count(), doc.matches("/>").count() - doc.matches("<circle").count());
}

#[test]
fn round_trip_reduced_file_is_valid_input() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("in.json");
    let reduced = dir.path().join("out.json");
    write_curve(&input, &sample_json());
    let out = bin()
        .args(["reduce", "--input"])
        .arg(&input)
        .args(["--degree", "6", "--mode", "c"])
        .arg("--output")
        .arg(&reduced)
        .output()
        .unwrap();
    assert!(out.status.success());
    // reduce the reduced file again; it must load cleanly
    let out2 = bin()
        .args(["reduce", "--input"])
        .arg(&reduced)
        .args(["--degree", "4", "--mode", "c"])
        .output()
        .unwrap();
    assert!(out2.status.success(), "{}", String::from_utf8_lossy(&out2.stderr));
}
