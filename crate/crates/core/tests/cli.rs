//! Command-line behaviour of the `exitwalk` binary.

use std::path::Path;
use std::process::{Command, Output};

fn exitwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exitwalk")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = exitwalk(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn run_json_is_bit_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let csv = dir.path().join("a.csv");
    for p in [&a, &b] {
        ok(&[
            "run", "--method", "woms", "--x0", "0.5,0", "--radius", "1", "--dim", "2", "--eps", "1e-5", "--gamma", "0.99",
            "--n", "5000", "--seed", "9", "--workers", "3", "--json", p.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
        ]);
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["schema"], "exitwalk.run/1");
    assert_eq!(v["config"]["method"], "woms");
    assert_eq!(v["config"]["workers"], 3);
    assert!(v["rng"].as_str().unwrap().contains("chacha8"));
    assert!(!v["build"].as_str().unwrap().is_empty());
    assert_eq!(v["statistics"]["n"], 5000);
    assert!(v["statistics"]["dirichlet_estimates"]["x^2-y^2"]["mean"].is_number());
    assert_eq!(header(&csv), "n,mean_time,var_time,ci95_time,mean_steps,var_steps,wall_seconds");
}

#[test]
fn precompute_then_table_run() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("tau.bin");
    let t = table.to_str().unwrap();
    ok(&["precompute", "--dim", "2", "--count", "5000", "--method", "inversion", "--out", t, "--seed", "1"]);
    let bytes = std::fs::read(&table).unwrap();
    assert_eq!(&bytes[..8], b"EXWTAU01");
    assert_eq!(bytes.len(), 32 + 8 * 5000);
    let out = ok(&["run", "--method", "wos-table", "--table", t, "--n", "2000", "--eps", "1e-4"]);
    assert!(out.starts_with("wos-table n=2000"));
    ok(&["precompute", "--dim", "3", "--count", "20", "--method", "euler", "--h", "1e-3", "--out", t, "--seed", "1"]);
    assert_eq!(std::fs::read(&table).unwrap()[16], 1);
}

#[test]
fn steps_and_timing_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let steps = dir.path().join("steps.csv");
    let json = dir.path().join("steps.json");
    ok(&[
        "steps", "--method", "wos-position", "--eps-list", "1e-2,1e-3,1e-4", "--n", "2000",
        "--csv", steps.to_str().unwrap(), "--json", json.to_str().unwrap(),
    ]);
    assert_eq!(header(&steps), "eps,abs_ln_eps,mean_steps,ci95");
    assert_eq!(std::fs::read_to_string(&steps).unwrap().lines().count(), 4);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert!(v["scaling"]["fit"]["slope"].as_f64().unwrap() > 0.0);

    let timing = dir.path().join("timing.csv");
    ok(&[
        "timing", "--methods", "woms,wos-position", "--eps-list", "1e-2,1e-3", "--n", "500", "--repeats", "1",
        "--csv", timing.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&timing).unwrap();
    assert_eq!(text.lines().next().unwrap(), "method,eps,abs_ln_eps,seconds");
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().nth(1).unwrap().starts_with("woms,1.0000000000000000e-2,"));
}

#[test]
fn pdf1d_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pdf.csv");
    let o = out.to_str().unwrap();
    for args in [
        vec!["pdf1d", "--boundary", "level", "--L", "1", "--terms", "3", "--grid", "64", "--out", o],
        vec!["pdf1d", "--boundary", "line", "--L", "1", "--beta", "0.5", "--terms", "3", "--grid", "64", "--out", o],
        vec!["pdf1d", "--boundary", "general-demo", "--L", "1", "--beta", "0.3", "--terms", "3", "--grid", "64", "--points", "10", "--out", o],
    ] {
        ok(&args);
        let text = std::fs::read_to_string(&out).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,q1,p_K");
        for line in text.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols.len(), 3);
            assert!(cols.iter().all(|c| c.is_finite()));
        }
    }
    // on straight lines the correction terms vanish
    ok(&["pdf1d", "--boundary", "line", "--L", "1", "--beta", "0.5", "--terms", "3", "--grid", "64", "--out", o]);
    for line in std::fs::read_to_string(&out).unwrap().lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], cols[2]);
    }
}

#[test]
fn invalid_input_fails_cleanly() {
    let out = exitwalk(&["run", "--method", "woms", "--x0", "1.5,0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid configuration"));
    let out = exitwalk(&["run", "--method", "wos-table", "--n", "10"]);
    assert!(!out.status.success());
    let out = exitwalk(&["run", "--method", "teleport"]);
    assert!(!out.status.success());
    let out = exitwalk(&["pdf1d", "--boundary", "level", "--L", "1", "--grid", "4", "--out", "/tmp/x.csv"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid too coarse"));
}
