use std::process::{Command, Output};

use serde_json::Value;

fn tripole(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tripole")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_defaults_pass_with_enough_checks() {
    let o = tripole(&["verify", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 300, "{}", checks.len());
    for key in ["phase_fractions", "area_ratio", "origin_value", "lp_norms", "growth"] {
        assert!(v["summaries"].get(key).is_some(), "missing {key}");
    }
    for key in ["name", "family", "k", "status", "residual"] {
        assert!(checks[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn reports_are_byte_identical() {
    let a = tripole(&["report", "--format", "json", "--kmax", "4"]);
    let b = tripole(&["report", "--format", "json", "--kmax", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn mutation_exits_two() {
    let o = tripole(&["verify", "--mutate", "skew-B0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("BA[0]"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tripole(&["verify", "--kmax", "x"]).status.code(), Some(1));
    assert_eq!(tripole(&[]).status.code(), Some(1));
    assert_eq!(tripole(&["profile", "--from", "0,0", "--to", "3,0"]).status.code(), Some(1));
    assert_eq!(tripole(&["--help"]).status.code(), Some(0));
}

#[test]
fn grid_csv_and_json_agree() {
    let csv = tripole(&["grid", "--grid", "9", "--rigid", "3/2√3,0,0"]);
    let json = tripole(&["grid", "--grid", "9", "--rigid", "3/2√3,0,0", "--format", "json"]);
    let text = stdout(&csv);
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,u1,u2,well_index,eps1,eps2,eps3"));
    let v: Value = serde_json::from_str(&stdout(&json)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 81);
    for (line, row) in lines.zip(rows) {
        for (cell, val) in line.split(',').zip(row.as_array().unwrap()) {
            match val.as_f64() {
                Some(x) => assert_eq!(cell.parse::<f64>().unwrap(), x),
                None => assert_eq!(cell, "NaN"),
            }
        }
    }
}

#[test]
fn params_and_out_files() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("landau.toml");
    std::fs::write(&params, "B = -30\nC = 200\nT = 0.8\n").unwrap();
    let out = dir.path().join("profile.csv");
    let o = tripole(&[
        "profile",
        "--from=-1,0.3",
        "--to=1,0.3",
        "--samples",
        "5",
        "--epsilon",
        "landau",
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("s,x,y,eps2,eps3,eps1,e1,e2,e3\n"));
    // the first sample sits in ω_{B₀}, variant 1 with ε ≈ 0.156394
    let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((first[3] - 0.156394).abs() < 1e-6);

    std::fs::write(&params, "Q = 1\n").unwrap();
    assert_eq!(tripole(&["areas", "--params", params.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn areas_csv_is_flat() {
    let o = tripole(&["areas"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("key,value\n"));
    let ratio = text.lines().find(|l| l.starts_with("area_ratio.ratio,")).unwrap();
    let r: f64 = ratio.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(format!("{r:.3}"), "0.999");
}
