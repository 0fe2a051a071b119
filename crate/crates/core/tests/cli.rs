use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use stpcs::io::{from_csv, load_matrix, MatrixKind};
use stpcs::worked_examples::default_golden_dir;

fn stpcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stpcs"))
        .args(args)
        .env_remove("STPCS_BUDGET")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn star_expansion_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("H.csv");
    let o = stpcs(&["gen", "bibd", "--alpha", "4", "--expansion", "star", "-o", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (h, kind) = load_matrix(&out).unwrap();
    assert_eq!(kind, MatrixKind::Boolean);
    assert_eq!(h.shape(), (6, 4));
    assert_eq!(h, load_matrix(&default_golden_dir().join("star4.csv")).unwrap().0);
}

#[test]
fn metrics_report_for_phi() {
    let phi = default_golden_dir().join("phi7x16.csv");
    let o = stpcs(&["metrics", "-i", path(&phi), "--rip-k", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["coherence"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!((v["welch_bound"].as_f64().unwrap() - 0.29277).abs() < 1e-5);
    assert_eq!(v["max_k"], 1);
    assert_eq!(v["spark_infinite"], false);
    assert!(v["spark"].as_u64().unwrap() >= 3);
    assert_eq!(v["rip"]["k"], 1);
}

#[test]
fn recover_round_trip_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let phi = default_golden_dir().join("phi7x16.csv");
    let x_path = dir.path().join("x.csv");
    let y_path = dir.path().join("y.csv");
    let got_path = dir.path().join("got.csv");
    let mut planted = vec!["0"; 32];
    planted[9] = "-2";
    planted[22] = "1";
    fs::write(&x_path, format!("# 32,1,real\n{}\n", planted.join("\n"))).unwrap();
    for side in ["left", "right"] {
        let o = stpcs(&[
            "compress",
            "-A",
            path(&phi),
            "-x",
            path(&x_path),
            "--side",
            side,
            "-o",
            path(&y_path),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let o = stpcs(&[
            "recover",
            "-A",
            path(&phi),
            "-y",
            path(&y_path),
            "--k",
            "1",
            "--side",
            side,
            "-o",
            path(&got_path),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let (got, _) = from_csv(&fs::read_to_string(&got_path).unwrap()).unwrap();
        let (want, _) = from_csv(&fs::read_to_string(&x_path).unwrap()).unwrap();
        assert!(got.approx_eq(&want, 1e-9), "{side}: {got}");
    }
}

#[test]
fn paper_examples_pass_and_write() {
    let dir = tempfile::tempdir().unwrap();
    let o = stpcs(&["paper-examples", "--write", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("15 of 15 examples match"));
    let (hv, _) = load_matrix(&dir.path().join("vertical4.csv")).unwrap();
    assert_eq!(hv.shape(), (7, 4));
}

#[test]
fn generated_matrices_are_deterministic() {
    let a = stpcs(&["gen", "random", "--rows", "3", "--cols", "5", "--seed", "9"]);
    let b = stpcs(&["gen", "random", "--rows", "3", "--cols", "5", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let c = stpcs(&["gen", "random", "--rows", "3", "--cols", "5", "--seed", "10"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn horizontal_expansion_with_weights() {
    let g = default_golden_dir();
    let o = stpcs(&[
        "expand",
        "horizontal",
        "-H",
        path(&g.join("vertical4.csv")),
        "-B",
        path(&g.join("signs3x4.csv")),
        "--diag",
        "1,2,3,4",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (phi, _) = from_csv(&stdout(&o)).unwrap();
    assert_eq!(phi.shape(), (7, 16));
    assert_eq!(phi.get(0, 3), -4.0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(stpcs(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(stpcs(&["gen", "bibd", "--alpha", "2"]).status.code(), Some(2));
    assert_eq!(stpcs(&["metrics"]).status.code(), Some(2));
    assert_eq!(stpcs(&["--help"]).status.code(), Some(0));
}

#[test]
fn domain_errors_exit_one_with_name() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "# 2,2,boolean\n1,2\n0,1\n").unwrap();
    let o = stpcs(&["metrics", "-i", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: BadEntry:"), "{}", stderr(&o));

    let o = stpcs(&["gen", "aocm", "-t", "9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: Unsupported:"), "{}", stderr(&o));

    let o = stpcs(&["metrics", "-i", path(&dir.path().join("missing.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: Io:"), "{}", stderr(&o));
}

#[test]
fn budget_variable_limits_search() {
    let phi = default_golden_dir().join("phi7x16.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_stpcs"))
        .args(["metrics", "-i", path(&phi)])
        .env("STPCS_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: BudgetExceeded:"), "{}", stderr(&o));
}

#[test]
fn project_and_basis_commands() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.csv");
    fs::write(&x, "# 4,1,real\n1\n3\n5\n7\n").unwrap();
    let o = stpcs(&["project", "-x", path(&x), "-n", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (p, _) = from_csv(&stdout(&o)).unwrap();
    assert_eq!(p.as_slice(), &[2.0, 6.0]);

    let o = stpcs(&["basis", "-m", "10"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 27);
    let o = stpcs(&["basis", "-m", "5", "--orthonormal"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 9);
}
