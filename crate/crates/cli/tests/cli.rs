// Published threshold values are quoted to six digits.
#![allow(clippy::approx_constant)]

use std::process::{Command, Output};

use serde_json::Value;

fn imsteer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imsteer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn imsteer_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imsteer"))
        .args(args)
        .env("IMSTEER_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn eval_werner() {
    let r = json(&imsteer(&["eval", "--state", "werner", "--v", "0.8"]));
    assert_eq!(num(&r["i2"]), 1.6);
    assert_eq!(r["violated"], true);
    assert_eq!(r["selected_witness"]["k"], 4);
    assert!(close(num(&r["selected_witness"]["expectation"]), 2f64.sqrt() - 1.6, 1e-8));
}

#[test]
fn eval_mems() {
    let r = json(&imsteer(&["eval", "--state", "mems", "--c", "0.5"]));
    assert_eq!(num(&r["i2"]), 1.0);
    assert_eq!(r["violated"], false);
}

#[test]
fn eval_zero_visibility_violates_nothing() {
    let r = json(&imsteer(&["eval", "--state", "werner", "--v", "0"]));
    assert_eq!(num(&r["i2"]), 0.0);
    assert_eq!(r["violated"], false);
    assert_eq!(num(&r["cffw"]["value"]), 0.0);
    assert_eq!(r["cffw"]["violated"], false);
    for g in ["l1", "rel_entropy", "skew"] {
        assert_eq!(num(&r["naqc"][g]["value"]), 0.0, "{g}");
        assert_eq!(r["naqc"][g]["violated"], false);
    }
    for g in ["l1", "rel_entropy"] {
        assert_eq!(num(&r["naqi"][g]["value"]), 0.0, "{g}");
        assert_eq!(r["naqi"][g]["violated"], false);
    }
}

#[test]
fn eval_unsharp_singlet() {
    let r = json(&imsteer(&["eval", "--state", "singlet", "--lambda", "0.5"]));
    assert_eq!(num(&r["i2"]), 1.0);
    assert_eq!(num(&r["i2_closed"]), 1.0);
    assert_eq!(r["measurement"]["kind"], "unsharp");
}

#[test]
fn eval_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(&path, r#"{"kind": "xstate", "beta": {"xx": -0.8, "yy": 0.1, "zz": 0.1}}"#).unwrap();
    let r = json(&imsteer(&["eval", "--state", path.to_str().unwrap()]));
    assert!(close(num(&r["i2"]), 0.9, 1e-9));

    let path = dir.path().join("bloch.json");
    std::fs::write(
        &path,
        r#"{"kind": "bloch", "m": [0, 0, 0], "n": [0, 0, 0], "T": [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]}"#,
    )
    .unwrap();
    let r = json(&imsteer(&["eval", "--state", path.to_str().unwrap()]));
    assert_eq!(num(&r["i2"]), 2.0);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let cases: [&[&str]; 6] = [
        &["eval", "--state", bad.to_str().unwrap()],
        &["eval", "--state", "no/such/file.json"],
        &["eval", "--state", "werner"],
        &["eval", "--state", "werner", "--v", "1.5"],
        &["region", "--resolution", "1"],
        &["audit", "--suite", "bogus"],
    ];
    for args in cases {
        let out = imsteer(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(imsteer(&["frobnicate"]).status.code(), Some(2));
    let out = imsteer_threads(&["region", "--resolution", "2"], "zero");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn region_examples() {
    let out = imsteer(&["region", "--resolution", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("beta_xx,beta_yy,beta_zz,valid,i2,violated"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25);
    let find = |x: &str, y: &str| rows.iter().find(|r| r[0] == x && r[1] == y).unwrap().clone();
    assert_eq!(find("1", "1")[4..], ["2", "true"]);
    assert_eq!(find("0.5", "0.5")[4..], ["1", "false"]);
    let r = find("-0.5", "1");
    assert_eq!(r[4..], ["1.5", "true"]);
    for r in &rows {
        assert_eq!(r[3], "true");
        let s = r[0].parse::<f64>().unwrap().abs() + r[1].parse::<f64>().unwrap().abs();
        assert_eq!(r[5] == "true", s > 2f64.sqrt());
    }
}

#[test]
fn region_point_from_design_grid() {
    let out = imsteer(&["region", "--resolution", "11", "--format", "json"]);
    let rows = json(&out);
    let row = rows
        .as_array()
        .unwrap()
        .iter()
        .find(|r| close(num(&r["beta_xx"]), -0.8, 1e-12) && close(num(&r["beta_yy"]), 0.8, 1e-12))
        .unwrap();
    assert!(close(num(&row["i2"]), 1.6, 1e-8));
    assert_eq!(row["violated"], true);
}

#[test]
fn thresholds_table() {
    let out = imsteer(&["thresholds", "--format", "json"]);
    let rows = json(&out);
    let get = |family: &str, criterion: &str| {
        num(&rows
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["family"] == family && r["criterion"] == criterion)
            .unwrap()["threshold"])
    };
    for family in ["werner", "unsharp_singlet"] {
        assert!(close(get(family, "isi"), 0.707107, 1e-6));
        assert!(close(get(family, "naqc_l1"), 0.8165, 1e-4));
        assert!(close(get(family, "naqi_l1"), 0.7454, 1e-4));
    }
}

#[test]
fn monogamy_reports() {
    let r = json(&imsteer(&["monogamy", "--samples", "20000", "--include-maximizer"]));
    assert!(close(num(&r["max_sum"]), 2.0 * 2f64.sqrt(), 1e-8));
    assert_eq!(r["within_bound"], true);

    let a = imsteer(&["monogamy", "--n", "1", "--seed", "42"]);
    let b = imsteer(&["monogamy", "--n", "1", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["samples"], 1);
}

#[test]
fn witness_examples() {
    let r = json(&imsteer(&["witness", "--state", "werner", "--v", "0.8"]));
    assert_eq!((r["k"].clone(), r["i"].clone(), r["j"].clone()), (4.into(), 1.into(), 1.into()));
    assert!(close(num(&r["expectation"]), -0.185786, 1e-6));
    assert_eq!(r["terms"].as_array().unwrap().len(), 8);
    assert_eq!(r["nonzero_terms"], 8);
    assert!(num(&r["reconstruction_residual"]) < 1e-12);

    let r = json(&imsteer(&["witness", "--state", "mems", "--c", "0.9"]));
    assert_eq!((r["k"].clone(), r["i"].clone(), r["j"].clone()), (4.into(), 0.into(), 1.into()));
    assert!(num(&r["expectation"]) < 0.0);

    let r = json(&imsteer(&["witness", "--state", "mixed"]));
    assert!(close(num(&r["expectation"]), 2f64.sqrt(), 1e-8));
    assert_eq!(r["detects"], false);
}

#[test]
fn audit_suites() {
    let rows = json(&imsteer(&["audit", "--suite", "separable", "--n", "100000"]));
    let row = &rows[0];
    assert_eq!(row["passed"], true);
    assert!(num(&row["worst"]) <= 2f64.sqrt());

    let rows = json(&imsteer(&["audit", "--suite", "duality", "--n", "10000"]));
    assert!(num(&rows[0]["worst"]) < 1e-9);

    let out = imsteer(&["audit", "--n", "2000"]);
    let rows = json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 5);
    assert!(rows.as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        &["audit", "--n", "9000", "--format", "csv"][..],
        &["monogamy", "--n", "40000"][..],
        &["region", "--resolution", "21"][..],
    ] {
        let one = imsteer_threads(args, "1");
        let four = imsteer_threads(args, "4");
        assert!(one.status.success() && four.status.success());
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = imsteer(&["thresholds", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("family,criterion,threshold,bound\n"));
    assert_eq!(text.lines().count(), 9);
}
