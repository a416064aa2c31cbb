use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ahlfors(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ahlfors")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scene(dir: &Path, name: &str, curves: &str) -> PathBuf {
    let path = dir.join(format!("{name}.scene"));
    std::fs::write(&path, format!(r#"{{"name": "{name}", "curves": [{curves}]}}"#)).unwrap();
    path
}

fn unit_disk(dir: &Path) -> PathBuf {
    scene(dir, "unit_disk", r#"{"kind": "circle", "center": [0, 0], "radius": 1}"#)
}

fn two_disks(dir: &Path) -> PathBuf {
    scene(
        dir,
        "two_disks",
        r#"{"kind": "circle", "center": [-3, 0], "radius": 1}, {"kind": "circle", "center": [3, 0], "radius": 1}"#,
    )
}

/// Rows of a CSV body as header-keyed string cells.
fn csv_rows(body: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = body.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect()).collect()
}

fn cell<'a>(row: &'a [(String, String)], column: &str) -> &'a str {
    &row.iter().find(|(c, _)| c == column).unwrap().1
}

#[test]
fn unit_disk_gamma_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = ahlfors(&["gamma", "--scene", unit_disk(dir.path()).to_str().unwrap(), "--nodes", "128"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let g: f64 = cell(&rows[0], "gamma").parse().unwrap();
    assert!((g - 1.0).abs() < 1e-10, "{g}");
}

#[test]
fn both_methods_agree_on_two_disks() {
    let dir = tempfile::tempdir().unwrap();
    let o = ahlfors(&["gamma", "--scene", two_disks(dir.path()).to_str().unwrap(), "--method", "both"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert_eq!(cell(&rows[0], "method"), "szego");
    assert_eq!(cell(&rows[1], "method"), "slit");
    let diff: f64 = cell(&rows[0], "relative_difference").parse().unwrap();
    assert!(diff <= 1e-5, "{diff}");
}

#[test]
fn node_doubling_stays_within_error_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let path = scene(dir.path(), "ellipse", r#"{"kind": "ellipse", "center": [0, 0], "a": 2, "b": 1, "angle": 0.3}"#);
    let run = |n: &str| {
        let o = ahlfors(&["gamma", "--scene", path.to_str().unwrap(), "--nodes", n]);
        let rows = csv_rows(&stdout(&o));
        let g: f64 = cell(&rows[0], "gamma").parse().unwrap();
        let e: f64 = cell(&rows[0], "error_estimate").parse().unwrap();
        (g, e)
    };
    let ((g1, e1), (g2, _)) = (run("32"), run("64"));
    assert!((g1 - g2).abs() < e1, "{g1} {g2} {e1}");
    assert!((g2 - 1.5).abs() < 1e-6);
}

#[test]
fn tangency_sweep_appends_extrapolation() {
    let o = ahlfors(&["sweep", "tangency", "--gaps", "0.2,0.1,0.05,0.025"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    assert_eq!(cell(&rows[4], "gap"), "0");
}

#[test]
fn json_records_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = ahlfors(&["koebe", "--scene", unit_disk(dir.path()).to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["meta"]["max_iter"], "50");
    assert_eq!(v["meta"]["iterations"], "0");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert!((v["rows"][0]["radius"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn svg_goes_to_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.svg");
    let o = ahlfors(&[
        "slitmap",
        "--scene",
        two_disks(dir.path()).to_str().unwrap(),
        "--format",
        "svg",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(out).unwrap();
    assert!(body.starts_with("<svg") && body.trim_end().ends_with("</svg>"));
}

#[test]
fn painleve_identity_holds() {
    let dir = tempfile::tempdir().unwrap();
    let o = ahlfors(&["painleve", "--scene", unit_disk(dir.path()).to_str().unwrap(), "--eps-ladder", "1"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let tv: f64 = cell(&rows[0], "total_variation").parse().unwrap();
    let err: f64 = cell(&rows[0], "identity_error").parse().unwrap();
    assert!(tv <= 2.0 + 1e-8 && err <= 1e-6, "{tv} {err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = ahlfors(&["gamma", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_scene_is_a_usage_error() {
    let o = ahlfors(&["gamma", "--scene", "/nonexistent/x.scene"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_ladder_and_svg_sweep_are_usage_errors() {
    assert_eq!(ahlfors(&["sweep", "tangency", "--gaps", "0.1,0.2"]).status.code(), Some(2));
    assert_eq!(ahlfors(&["sweep", "counterexample", "--format", "svg"]).status.code(), Some(2));
}

#[test]
fn unsupported_slit_map_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = scene(
        dir.path(),
        "three",
        r#"{"kind": "circle", "center": [-3, 0], "radius": 1}, {"kind": "circle", "center": [0, 0], "radius": 1}, {"kind": "circle", "center": [3, 0], "radius": 1}"#,
    );
    let o = ahlfors(&["slitmap", "--scene", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn help_documents_schemas() {
    let o = ahlfors(&["--help"]);
    assert!(o.status.success());
    let help = stdout(&o);
    for word in ["csv", "json", "svg", "gammac", "identity_error", "Exit status"] {
        assert!(help.contains(word), "{word}");
    }
}
