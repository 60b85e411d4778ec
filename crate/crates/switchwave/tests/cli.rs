use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use switchwave::read_series_csv;

fn switchwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_pointwise_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("energy.csv");
    let json = dir.path().join("summary.json");
    let out = switchwave(&[
        "simulate-pointwise",
        "--ell",
        "1",
        "--a",
        "1",
        "--ic",
        "sine",
        "--grid",
        "32",
        "--tmax",
        "40",
        "--out",
        path_str(&csv),
        "--json",
        path_str(&json),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let parsed = read_series_csv(fs::read(&csv).unwrap().as_slice()).unwrap();
    assert_eq!(parsed.param("system"), Some("pointwise"));
    assert_eq!(parsed.series.len(), 40 * 64 + 1);

    let v: serde_json::Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["system"], "pointwise");
    let rho = v["spectral_radius"].as_f64().unwrap();
    assert!((rho - 2f64.powf(-0.25)).abs() < 1e-12);
    assert!(v["fitted_slope"].as_f64().unwrap() < 0.0);
    assert_eq!(v["stable_predicted"], true);
}

#[test]
fn invalid_parameters_exit_nonzero() {
    let cases: [&[&str]; 5] = [
        &["simulate-pointwise", "--a", "1", "--grid", "0"],
        &["simulate-boundary", "--mu1", "1", "--mu2", "0.5"],
        &["simulate-pointwise", "--a", "1", "--xi", "0.3"],
        &["simulate-pointwise", "--a", "1", "--ic", "square"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = switchwave(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn stability_region_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("region.csv");
    let out = switchwave(&[
        "stability-region",
        "--system",
        "boundary",
        "--mu1-range",
        "-4:4:0.5",
        "--mu2-range",
        "-4:4:0.5",
        "--out",
        path_str(&csv),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(" 0 disagreements"));
    let text = fs::read_to_string(&csv).unwrap();
    // mu1 = 1 is dropped: 16 columns of 17 points.
    assert_eq!(text.lines().count(), 2 + 16 * 17);
}

#[test]
fn predict_rate_to_stdout() {
    let out = switchwave(&[
        "predict-rate",
        "--system",
        "boundary",
        "--mu1",
        "5",
        "--mu2",
        "2",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["spectral_radius"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["predicted_slope"].as_f64().unwrap() + 0.5f64.ln().abs() / 2.0).abs() < 1e-12);
    assert!(v["fitted_slope"].is_null());
}

#[test]
fn simulate_internal_reports_contraction() {
    let out = switchwave(&[
        "simulate-internal",
        "--grid",
        "64",
        "--tmax",
        "30",
        "--b1",
        "1",
        "--b2",
        "0.5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let alpha = v["params"]["alpha"].as_f64().unwrap();
    assert!(alpha > 0.0 && alpha < 1.0);
}

#[test]
fn cross_validate_table() {
    let out = switchwave(&[
        "cross-validate",
        "--system",
        "pointwise",
        "--a",
        "1",
        "--grid",
        "16",
        "--resolutions",
        "32,64",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("32,"));
}
