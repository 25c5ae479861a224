use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hydromono"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn spectrum_csv() {
    let text = stdout(&["spectrum", "--n", "12", "--a", "144/5"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,g"));
    let rows: Vec<(i64, f64)> = lines
        .map(|l| {
            let (m, g) = l.split_once(',').unwrap();
            (m.parse().unwrap(), g.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 144);
    assert!(rows
        .windows(2)
        .all(|w| w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1)));
}

#[test]
fn ground_state_row() {
    assert_eq!(stdout(&["spectrum", "--n", "1", "--a", "3"]), "m,g\n0,0\n");
}

#[test]
fn column_filter() {
    let text = stdout(&["spectrum", "--n", "5", "--a", "2", "--m", "-3"]);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.starts_with("-3,")));
    assert_eq!(code(&["spectrum", "--n", "5", "--a", "2", "--m", "5"]), 2);
}

#[test]
fn precondition_exit_codes() {
    assert_eq!(code(&["spectrum", "--n", "0", "--a", "1"]), 2);
    assert_eq!(code(&["spectrum", "--n", "3", "--a", "-1"]), 2);
    assert_eq!(code(&["spectrum", "--n", "3", "--a", "1/0"]), 2);
    assert_eq!(code(&["spectrum", "--n", "3"]), 2);
    assert_eq!(code(&["monodromy", "--n", "3", "--a", "1"]), 2);
    assert_eq!(
        code(&["spectrum", "--n", "3", "--a", "1", "--out", "/nonexistent/dir/x.csv"]),
        2
    );
}

#[test]
fn json_layout() {
    let doc = json(&["spectrum", "--n", "2", "--a", "1", "--format", "json"]);
    let keys: Vec<&str> = doc.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["params", "result", "diagnostics"]);
    assert_eq!(doc["params"]["a_text"], "1");
    assert_eq!(doc["params"]["E"].to_string(), "-0.125000000000000");
    let gs: Vec<String> = doc["result"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["g"].to_string())
        .collect();
    assert_eq!(gs.len(), 4);
    assert_eq!(gs[0], "2.00000000000000");
    for g in &gs {
        let digits = g.trim_start_matches('-').replace('.', "");
        assert_eq!(digits.trim_start_matches('0').len(), 15, "{g}");
    }
    let g1: f64 = gs[2].parse().unwrap();
    assert!((g1 - (1.0 + 2f64.sqrt())).abs() < 1e-14);
}

#[test]
fn critical_isolated_rows() {
    let header = "s0,l_z,g,branch";
    let with = stdout(&["critical", "--n", "12", "--a", "4"]);
    assert_eq!(with.lines().next(), Some(header));
    assert!(with.lines().any(|l| l == "1,0,8,isolated"));
    let without = stdout(&["critical", "--n", "12", "--a", "288"]);
    assert!(!without.contains("isolated") && !without.contains("degenerate"));
    assert!(without.contains("eta-inner"));
    let degenerate = stdout(&["critical", "--n", "12", "--a", "144"]);
    assert!(degenerate.lines().any(|l| l == "1,0,288,degenerate"));
}

#[test]
fn monodromy_verdicts() {
    let doc = json(&["monodromy", "--n", "12", "--a", "144/5"]);
    assert_eq!(doc["result"]["verdict"], "defect");
    assert_eq!(doc["diagnostics"]["det"], 1);
    assert_eq!(doc["diagnostics"]["trace"], 2);
    assert_eq!(doc["diagnostics"]["parabolic_index"].as_i64().map(i64::abs), Some(1));
    let trace = doc["result"]["trace"].as_array().unwrap();
    assert_eq!(trace.first().unwrap()["anchor"], trace.last().unwrap()["anchor"]);

    let regular = json(&["monodromy", "--n", "12", "--a", "288", "--center", "0,400"]);
    assert_eq!(regular["result"]["verdict"], "no-defect");
    assert_eq!(regular["result"]["matrix"], serde_json::json!([[1, 0], [0, 1]]));
}

#[test]
fn monodromy_failures() {
    let out = run(&["monodromy", "--n", "4", "--a", "1000"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible loop"));
    assert_eq!(code(&["monodromy", "--n", "12", "--a", "288"]), 3);
    assert_eq!(
        code(&["monodromy", "--n", "12", "--a", "144/5", "--loop-width", "0"]),
        2
    );
}

#[test]
fn monodromy_fixed_width() {
    let doc = json(&["monodromy", "--n", "12", "--a", "144/5", "--loop-width", "2"]);
    assert_eq!(doc["result"]["loop"]["columns"], serde_json::json!([-2, 2]));
    assert_eq!(doc["result"]["verdict"], "defect");
}

#[test]
fn round_trip_through_json() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("spec.json");
    let file = file.to_str().unwrap();
    for (a, center) in [("144/5", None), ("288", Some("0,400"))] {
        stdout(&["spectrum", "--n", "12", "--a", a, "--format", "json", "--out", file]);
        let mut from_file = vec!["monodromy", "--input", file];
        let mut direct = vec!["monodromy", "--n", "12", "--a", a];
        if let Some(c) = center {
            from_file.extend(["--center", c]);
            direct.extend(["--center", c]);
        }
        let x = json(&from_file);
        let y = json(&direct);
        assert_eq!(x["result"]["verdict"], y["result"]["verdict"]);
        assert_eq!(x["result"]["matrix"], y["result"]["matrix"]);
    }
    assert_eq!(code(&["monodromy", "--input", file, "--n", "12"]), 2);
    assert_eq!(code(&["monodromy", "--input", "/nonexistent.json"]), 2);
}

#[test]
fn actions_rows() {
    let text = stdout(&["actions", "--n", "2", "--a", "1"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n_eta,g_exact,g_ebk,abs_err"));
    let row = lines.find(|l| l.starts_with("0,1,")).unwrap();
    let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
    assert!((fields[2] - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!((fields[4] - (fields[2] - fields[3]).abs()).abs() < 1e-12);
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn reduced_slice() {
    let text = stdout(&["reduced", "--n", "12", "--m", "0", "--a", "4,36,288"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("curve,a,g,rho1,rho2"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let section: Vec<_> = rows.iter().filter(|r| r[0] == "section").collect();
    assert_eq!(
        section.first().map(|r| (r[3], r[4])),
        section.last().map(|r| (r[3], r[4]))
    );
    let mut gs: Vec<&str> = rows.iter().filter(|r| r[0] == "line").map(|r| r[2]).collect();
    gs.dedup();
    assert_eq!(gs, ["8", "72", "576"]);
    // every line passes through the singular point (n, 0)
    for g in ["8", "72", "576"] {
        let end = rows.iter().rfind(|r| r[0] == "line" && r[2] == g).unwrap();
        assert_eq!(end[3], "12");
        assert!(end[4].parse::<f64>().unwrap().abs() < 1e-9);
    }
}

#[test]
fn figures_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let listing = stdout(&["figures", "--which", "5", "--out", out]);
    assert_eq!(listing.lines().count(), 3);
    for n in [6, 21, 41] {
        let path = Path::new(out).join(format!("fig5_n{n}.svg"));
        let svg = std::fs::read_to_string(path).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 2 * n * n + 2);
    }
    assert_eq!(code(&["figures", "--which", "2", "--out", out]), 2);
}

#[test]
fn deterministic_output() {
    for args in [
        vec!["spectrum", "--n", "12", "--a", "144/5", "--format", "json"],
        vec!["critical", "--n", "12", "--a", "36"],
        vec!["monodromy", "--n", "12", "--a", "144/5"],
        vec!["monodromy", "--n", "12", "--a", "144/5", "--format", "svg"],
    ] {
        assert_eq!(stdout(&args), stdout(&args), "{args:?}");
    }
}
