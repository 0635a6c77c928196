use std::path::PathBuf;
use std::process::{Command, Output};

fn roter(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roter")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_chart(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("roter-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn flat_chart_file_has_zero_residual_tables() {
    let path = write_chart("flat3.chart", "dim = 3\ng[1][1] = 1\ng[2][2] = 1\ng[3][3] = 1\n");
    let out = roter(&["analyze", "--chart-file", path.to_str().unwrap(), "--samples", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["aggregate"]["modal_class"], "flat");
    for p in report["points"].as_array().unwrap() {
        assert_eq!(p["curvature_form"]["flat_ratio"].as_f64(), Some(0.0));
        for row in p["symmetry"]["semisymmetry"].as_array().unwrap() {
            assert_eq!(row["residual"].as_f64(), Some(0.0));
        }
    }
}

#[test]
fn chart_file_parameters_can_be_overridden() {
    let text = "dim = 3\nparam.c = 1\ng[1][1] = 1\ng[2][2] = exp(c*x1)\ng[3][3] = exp(c*x1)\n";
    let path = write_chart("block.chart", text);
    let path = path.to_str().unwrap();
    let curved = json(&roter(&["analyze", "--chart-file", path, "--samples", "2"]));
    assert_eq!(curved["aggregate"]["modal_class"], "constant curvature");
    let flat = json(&roter(&["analyze", "--chart-file", path, "--param", "c=0", "--samples", "2"]));
    assert_eq!(flat["aggregate"]["modal_class"], "flat");
    let bad = roter(&["analyze", "--chart-file", path, "--param", "c=exp(1)"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn text_output_repeats_json_numbers() {
    let args = ["analyze", "--metric", "met2-block", "--point", "0.1,0.2,0.3"];
    let j = json(&roter(&args));
    let text = String::from_utf8(roter(&[&args[..], &["--format", "text"]].concat()).stdout).unwrap();
    let kappa = j["points"][0]["kappa"].as_f64().unwrap();
    assert!(text.contains(&format!("points[0].kappa = {kappa:.16e}")), "{text}");
    assert!(text.starts_with("metric met2-block (dim 3), 1 points"));
}

#[test]
fn seed_changes_points_but_not_verdicts() {
    let a = json(&roter(&["analyze", "--metric", "met2", "--samples", "3", "--seed", "1"]));
    let b = json(&roter(&["analyze", "--metric", "met2", "--samples", "3", "--seed", "2"]));
    assert_ne!(a["points"][0]["point"], b["points"][0]["point"]);
    assert_eq!(a["aggregate"]["modal_class"], b["aggregate"]["modal_class"]);
}

#[test]
fn exit_codes() {
    assert_eq!(roter(&["analyze", "--metric", "nope"]).status.code(), Some(3));
    assert_eq!(roter(&["analyze"]).status.code(), Some(3));
    assert_eq!(roter(&["analyze", "--metric", "met2", "--param", "oops"]).status.code(), Some(3));
    assert_eq!(roter(&["analyze", "--metric", "met2", "--point", "1,2"]).status.code(), Some(3));
    assert_eq!(
        roter(&["analyze", "--metric", "met2", "--accept-tol", "1e-3", "--reject-tol", "1e-4"]).status.code(),
        Some(3)
    );
    assert_eq!(
        roter(&["analyze", "--metric", "met1", "--param", "f=exp(x2)", "--param", "h=1"]).status.code(),
        Some(3)
    );
    assert_eq!(roter(&["--help"]).status.code(), Some(0));

    let bad_point = "0.1,0.2,0.3,0.4,-0.5,0.6";
    let good_point = "0.1,0.2,0.3,0.4,1.5,0.6";
    let out = roter(&["analyze", "--metric", "met2", "--point", bad_point]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = roter(&["analyze", "--metric", "met2", "--point", bad_point, "--point", good_point]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipped point"));
    assert_eq!(json(&out)["failures"].as_array().unwrap().len(), 1);
    let strict = roter(&["analyze", "--metric", "met2", "--point", bad_point, "--point", good_point, "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn singular_metric_is_an_engine_error() {
    let path = write_chart("degenerate.chart", "dim = 3\ng[1][1] = x1\ng[2][2] = 1\ng[3][3] = 1\n");
    let out = roter(&["analyze", "--chart-file", path.to_str().unwrap(), "--point", "0,0.5,0.5"]);
    assert_eq!(out.status.code(), Some(2));
}
