//! End-to-end tests for the `ballszego` binary: exit codes, artifact
//! content, and byte-level determinism across runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballszego"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).expect("artifact exists");
    serde_json::from_str(&text).expect("artifact parses")
}

const CIRCLE_SPEC: &str = r#"{
  "d": 1,
  "weight": {
    "scale": 0.8,
    "exponent": 2.0,
    "g": [
      { "index": [0], "re": 1.0, "im": 0.0 },
      { "index": [1], "re": -0.5, "im": 0.0 }
    ]
  }
}"#;

#[test]
fn counterexample_certificate_holds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "counterexample",
        "-N",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("counterexample.json"));
    assert_eq!(report["verdict"], "strict-gap");
    let two_over_e = 2.0 / std::f64::consts::E;
    assert!((report["entropy_rhs"].as_f64().unwrap() - two_over_e).abs() < 1e-9);
    assert!((report["gap"].as_f64().unwrap() - (1.0 - two_over_e)).abs() < 1e-9);
    assert_eq!(report["max_gamma"].as_f64().unwrap(), 0.0);
}

#[test]
fn szego_report_certifies_equality_for_lebesgue() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "szego",
        "--preset",
        "lebesgue",
        "-N",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&dir.path().join("szego.json"));
    assert_eq!(report["verdict"], "equality-certified");
    assert!((report["second_list"]["from_defects"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(&[
            "szego",
            "--preset",
            "counterexample",
            "-N",
            "7",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    let bytes_a = fs::read(a.path().join("szego.json")).unwrap();
    let bytes_b = fs::read(b.path().join("szego.json")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn verify_passes_on_presets_and_file_specs() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["lebesgue", "stable-demo"] {
        let out = run(&[
            "verify",
            "--preset",
            preset,
            "-N",
            "9",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "preset {preset}");
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains("verify: ok"));
    }
    let spec_path = dir.path().join("circle.json");
    fs::write(&spec_path, CIRCLE_SPEC).unwrap();
    let out = run(&[
        "verify",
        "--spec",
        spec_path.to_str().unwrap(),
        "-N",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("verify.json"));
    assert_eq!(report["ok"], true);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&run(&["szego", "--preset", "nosuch"])), 64);
    assert_eq!(code(&run(&["moments", "--badflag"])), 64);
    assert_eq!(code(&run(&["moments"])), 64); // neither --spec nor --preset
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["moments", "--spec", bad.to_str().unwrap()])), 64);
    // Resolution below the degree-exactness requirement for the window.
    let spec_path = dir.path().join("quartic.json");
    fs::write(
        &spec_path,
        r#"{"d":1,"weight":{"scale":1.0,"exponent":4.0,"g":[{"index":[0],"re":1.0,"im":0.0},{"index":[1],"re":-0.5,"im":0.0}]}}"#,
    )
    .unwrap();
    let out = run(&[
        "moments",
        "--spec",
        spec_path.to_str().unwrap(),
        "-N",
        "12",
        "--nodes",
        "8",
    ]);
    assert_eq!(code(&out), 64);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["szego", "--help"])), 0);
}

#[test]
fn degenerate_kernel_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("atom_only.json");
    fs::write(
        &spec_path,
        r#"{"d":1,"atoms":[{"point":[[1.0,0.0]],"mass":0.5}]}"#,
    )
    .unwrap();
    let out = run(&[
        "ops",
        "--spec",
        spec_path.to_str().unwrap(),
        "-N",
        "4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn csv_artifacts_have_stable_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verblunsky",
        "--preset",
        "counterexample",
        "-N",
        "5",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("verblunsky.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,index_i,index_j,re,im,defect"));
    // Every coefficient of the diagonal example vanishes and every defect is 1.
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[4], "0");
        assert_eq!(fields[5], "0");
        assert_eq!(fields[6], "1");
    }

    let out = run(&[
        "christoffel",
        "--preset",
        "stable-demo",
        "-N",
        "9",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("christoffel.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("level,max_rank,lambda,lower_bound"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        let lambda: f64 = fields[2].parse().unwrap();
        let lower: f64 = fields[3].parse().unwrap();
        assert!(lambda >= lower - 1e-8);
    }
}

#[test]
fn moments_artifact_reports_unit_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "moments",
        "--preset",
        "lebesgue",
        "-N",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&dir.path().join("moments.json"));
    assert_eq!(report["total_mass"].as_f64().unwrap(), 1.0);
    assert_eq!(report["entries"].as_array().unwrap().len(), 36);
}

#[test]
fn reconstruct_roundtrips_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "reconstruct",
        "--preset",
        "stable-demo",
        "-N",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&dir.path().join("reconstruct.json"));
    assert_eq!(report["ok"], true);
    assert!(report["relative_deviation"].as_f64().unwrap() < 1e-10);
}
