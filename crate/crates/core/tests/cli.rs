// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use kreissometer::io::write_matrix_market;
use kreissometer::linalg::c;
use kreissometer::CMatrix;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kreissometer")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_examples() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "zero.mtx", &write_matrix_market(&CMatrix::zeros(2), &[]));
    let v = json(&run(&["analyze", &zero]));
    assert_eq!(v["schema"], "kreissometer/1");
    for k in ["k1", "k2", "calk"] {
        assert!((v["functionals"][k]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    }

    let nil = write(dir.path(), "nil.mtx", &write_matrix_market(&CMatrix::jordan(c(0.0, 0.0), 2), &[]));
    let v = json(&run(&["analyze", &nil]));
    assert_eq!(v["stability"]["quasi_stable"], false);
    assert_eq!(v["functionals"]["calk"]["diverged"], true);

    let half = write(dir.path(), "half.mtx", "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 0.5\n");
    let v = json(&run(&["analyze", &half, "--discrete"]));
    assert_eq!(v["mode"], "discrete");
    assert_eq!(v["functionals"]["k1"]["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn grid_region_and_cauchy_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mtx", &write_matrix_market(&CMatrix::diag_real(&[-1.0]), &[]));
    let out = run(&["grid", &a, "--grid", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 10);

    let out = run(&["region", &a, "--grid", "4", "--r", "2", "--re-min", "-3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "re,im,r,region,member");
    assert_eq!(text.lines().count(), 17);

    let cdir = dir.path().join("cauchy");
    let out = run(&["cauchy", &a, "--y-max", "1000", "--y-count", "2001", "--out", cdir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let env = std::fs::read_to_string(cdir.join("envelope.csv")).unwrap();
    let rows: Vec<Vec<f64>> = env.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.iter().all(|r| r[2] == rows[0][2]));
    let mid = rows.len() / 2;
    assert!(rows[0][3] < rows[mid][3] / 100.0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(cdir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["violation_count"], 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["analyze", "/nonexistent/file.mtx"]).status.code(), Some(4));
    let bad = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\nx\n1\n1\n");
    let out = run(&["analyze", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    let rect = write(dir.path(), "rect.mtx", "%%MatrixMarket matrix array real general\n2 1\n1\n2\n");
    assert_eq!(run(&["analyze", &rect]).status.code(), Some(2));
    let a = write(dir.path(), "a.mtx", &write_matrix_market(&CMatrix::diag_real(&[2.0]), &[]));
    assert_eq!(run(&["cauchy", &a, "--y-count", "11"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", &a, "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", &a, "--certify", "--eps-scaling", "0"]).status.code(), Some(2));
    assert_eq!(run(&["family", "--kind", "defective-axis", "--n", "1", "--count", "2"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_kreissometer"))
        .args(["analyze", &a])
        .env("KREISS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn family_from_symbol_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = format!(
        "{}{}",
        write_matrix_market(&CMatrix::diag_real(&[-1.0]), &["xi: 0".into()]),
        write_matrix_market(&CMatrix::diag_real(&[-2.0]), &["xi: 1".into()])
    );
    let t = write(dir.path(), "table.mtx", &table);
    let v = json(&run(&["family", "--kind", "symbol-sampled", "--n", "1", "--count", "2", "--symbol-table", &t]));
    assert_eq!(v["report"]["member_count"], 2);
    assert_eq!(v["report"]["verdict"]["uniformity"], "uniform");
}
