use std::fs;
use std::process::{Command, Output};

fn dext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dext")).args(args).output().expect("spawn dext")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hardy_gamma_is_product_of_moduli() {
    let o = dext(&["gamma", "--kernel", "hardy", "--points", r#"[{"r":0.5,"theta":0},{"re":0.0,"im":0.7}]"#, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let g = v["gamma"].as_f64().unwrap();
    assert!((g - 0.35).abs() < 1e-12, "{g}");
}

#[test]
fn double_zero_via_order() {
    let a = dext(&["gamma", "--points", r#"[{"r":0.4,"theta":1},{"r":0.4,"theta":1,"order":1}]"#, "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    let g = v["gamma"].as_f64().unwrap();
    assert!(g > 0.0 && g < 0.4);
}

#[test]
fn exit_codes() {
    assert_eq!(dext(&["gamma", "--points", "[]"]).status.code(), Some(2));
    assert_eq!(dext(&["gamma", "--points", r#"[{"r":1.2,"theta":0}]"#]).status.code(), Some(2));
    assert_eq!(dext(&["gamma", "--kernel", "bergman", "--points", r#"[{"r":0.5,"theta":0}]"#]).status.code(), Some(2));
    assert_eq!(dext(&["atomic", "--a=-1"]).status.code(), Some(2));
    assert_eq!(dext(&["check", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(dext(&["sums", "--thetas", "0.5,2.0"]).status.code(), Some(2));
    assert_eq!(dext(&["gamma", "--points", "/nonexistent/points.json"]).status.code(), Some(2));
}

#[test]
fn points_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pts.json");
    fs::write(&p, r#"[{"r":0.3,"theta":0.2},{"r":0.6,"theta":2.0}]"#).unwrap();
    let a = dext(&["gamma", "--points", p.to_str().unwrap(), "--format", "csv"]);
    let b = dext(&["gamma", "--points", r#"[{"r":0.3,"theta":0.2},{"r":0.6,"theta":2.0}]"#, "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn repeat_runs_are_byte_identical() {
    for args in [
        &["check", "--seed", "3", "--trials", "4", "--format", "json"][..],
        &["appendix-figure", "--grid", "41"][..],
        &["certify", "--points", r#"[{"r":0.9,"theta":0},{"r":0.95,"theta":0.02},{"r":0.5,"theta":3}]"#][..],
    ] {
        let a = dext(args);
        let b = dext(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn appendix_csv_matches_formula() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig.csv");
    let svg = dir.path().join("fig.svg");
    let o = dext(&["appendix-figure", "--out", csv.to_str().unwrap(), "--plot", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,gamma_gramian,gamma_formula,abs_diff"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 181);
    let worst = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst}");
    let plot = fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.contains("polyline"));
}

#[test]
fn appendix_a_zero_marks_the_jump() {
    let o = dext(&["appendix-figure", "--a", "0", "--grid", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("t,gamma_gramian,discontinuity\n"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",1")).count(), 1);
}

#[test]
fn atomic_table() {
    let o = dext(&["atomic", "--a", "1e-4,0.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("a,A,A_direct,method_gap,gamma"));
    for l in text.lines().skip(1) {
        let gap: f64 = l.split(',').nth(3).unwrap().parse().unwrap();
        assert!(gap < 1e-12);
    }
}

#[test]
fn certify_dominates_and_reports() {
    let o = dext(&[
        "certify",
        "--partition",
        r#"[{"vertex":0,"points":[{"r":0.9,"theta":0.01},{"r":0.97,"theta":-0.01}]},{"vertex":3,"points":[{"r":0.5,"theta":3}]}]"#,
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dominated"], serde_json::Value::Bool(true));
    assert_eq!(v["clusters"].as_array().unwrap().len(), 2);
    assert!(v["pushout_condition_sum"].as_f64().unwrap() <= v["condition_sum"].as_f64().unwrap() + 1e-15);
}

#[test]
fn inner_with_singular_factor_has_infinite_norm() {
    let o = dext(&["inner", "--measure", r#"[{"theta":0,"mass":0.25}]"#, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["dirichlet_norm_sq"].is_null() || v["dirichlet_norm_sq"].as_f64() == Some(f64::INFINITY));
    let b = dext(&["inner", "--points", r#"[{"r":0.5,"theta":0}]"#, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&b)).unwrap();
    assert!(v["dirichlet_norm_sq"].as_f64().unwrap().is_finite());
}

#[test]
fn sums_kinds() {
    let o = dext(&["sums", "--gammas", "0.9,0.99", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,gamma,partial_defect\n1,0.9,0.09999999999999998\n2,0.99,0.10999999999999999\n");
    let o = dext(&["sums", "--thetas", "0.5,0.25,0.125", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "entropy");
}

#[test]
fn check_passes_and_explores() {
    let o = dext(&["check", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = dext(&["check", "--suite", "pushout", "--kernel", "appendix_a", "--a", "0.01", "--trials", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v[0];
    assert_eq!(r["status"], "explore");
    let cx = &r["counterexample"];
    assert!(cx["gamma_w"].as_f64().unwrap() < cx["gamma_z"].as_f64().unwrap());
}
