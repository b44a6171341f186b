//! End-to-end checks of the binary: flag validation and exit codes, output
//! schemas, determinism across runs and thread counts, and cache neutrality.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_delta-moments"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["constants", "--a", "0.1"],
        vec!["constants", "--a", "-0.5"],
        vec!["constants", "--a", "-0.25", "--k", "9"],
        vec!["relations", "--k", "3", "--y", "20"], // neither --l nor --pattern
        vec!["moments", "--a", "-0.25", "--quad-order", "12"],
        vec!["moments", "--a", "-0.25", "--tmin", "4096", "--tmax", "4096"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?}");
    }
    // unknown flags are usage errors too (clap's own exit code)
    let out = run(&["constants", "--a", "-0.25", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constants_json_schema() {
    let out = run(&["constants", "--a", "-0.25", "--k", "3", "--y", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for field in [
        "a",
        "k",
        "y",
        "s_kl",
        "B_k",
        "C_k_density",
        "C_k_integrated",
        "b_a",
        "A0",
        "alpha",
        "delta",
        "branch",
        "corollary_delta",
    ] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
    assert_eq!(v["a"].as_f64().unwrap(), -0.25);
    assert_eq!(v["A0"].as_f64().unwrap(), 5.0);
    assert!((v["delta"].as_f64().unwrap() - 1.0 / 28.0).abs() < 1e-15);
    assert_eq!(
        v["delta"].as_f64().unwrap(),
        v["corollary_delta"].as_f64().unwrap()
    );
    assert!(v["s_kl"].get("1").is_some() && v["s_kl"].get("2").is_some());
}

#[test]
fn relations_outputs() {
    let out = run(&["relations", "--k", "3", "--l", "1", "--y", "20", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12); // header + 11 tuples
    assert_eq!(lines[0], "n1,n2,n3,pattern,l");
    assert_eq!(lines[1], "4,1,1,011,1");

    let out = run(&["relations", "--k", "3", "--pattern", "1,1", "--y", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 11);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["ns"], serde_json::json!([4, 1, 1]));
    assert_eq!(first["l"], serde_json::json!(1));
}

#[test]
fn moments_json_lines_and_fit() {
    let out = run(&[
        "moments", "--a", "-0.25", "--k", "2", "--tmin", "256", "--tmax", "16384",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7); // 6 windows (T = 256..8192) + fit summary
    for line in &lines[..6] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["value"].as_f64().unwrap() > 0.0);
        assert!(v["ratio"].as_f64().unwrap().is_finite());
        assert_eq!(v["k"], serde_json::json!(2));
    }
    let fit: serde_json::Value = serde_json::from_str(lines[6]).unwrap();
    let slope = fit["slope"].as_f64().unwrap();
    assert!((slope - 1.25).abs() < 0.25, "slope {slope}");
}

#[test]
fn fit_requires_enough_windows() {
    let out = run(&["fit", "--a", "-0.25", "--k", "2", "--tmin", "1024", "--tmax", "8192"]);
    assert_eq!(out.status.code(), Some(1));
    // moments still emits the records without a fit
    let out = run(&["moments", "--a", "-0.25", "--k", "2", "--tmin", "1024", "--tmax", "8192"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn deterministic_across_runs_and_threads() {
    let args = [
        "moments", "--a", "-0.25", "--k", "3", "--tmin", "256", "--tmax", "8192", "--y", "50",
    ];
    let one = bin().args(args).args(["--threads", "1"]).output().unwrap();
    let four = bin().args(args).args(["--threads", "4"]).output().unwrap();
    let again = bin().args(args).args(["--threads", "4"]).output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn cache_never_changes_output() {
    let dir = std::env::temp_dir().join(format!("dm_cli_cache_{}", std::process::id()));
    let dir_s = dir.to_str().unwrap();
    let args = ["constants", "--a", "-0.1", "--k", "3", "--y", "400"];
    let plain = run(&args);
    let cold = bin().args(args).args(["--cache-dir", dir_s]).output().unwrap();
    let warm = bin().args(args).args(["--cache-dir", dir_s]).output().unwrap();
    assert_eq!(plain.status.code(), Some(0));
    assert_eq!(plain.stdout, cold.stdout);
    assert_eq!(cold.stdout, warm.stdout);
    // the warm run really had a cache file to read
    let entries: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1);
    assert!(entries[0].extension().unwrap() == "sgma");

    // environment variable wins over the flag
    let env_dir = std::env::temp_dir().join(format!("dm_cli_env_{}", std::process::id()));
    let via_env = bin()
        .args(args)
        .args(["--cache-dir", "/nonexistent/denied"])
        .env("DELTA_MOMENTS_CACHE", &env_dir)
        .output()
        .unwrap();
    assert_eq!(via_env.status.code(), Some(0));
    assert_eq!(via_env.stdout, plain.stdout);
    assert!(env_dir.join("sigma_a-0.1_n400.sgma").is_file());

    std::fs::remove_dir_all(&dir).ok();
    std::fs::remove_dir_all(&env_dir).ok();
}

#[test]
fn verify_suite_passes() {
    let out = run(&["verify", "--a", "-0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().count() >= 8);
    for line in text.lines() {
        assert!(line.starts_with("PASS "), "unexpected line {line:?}");
    }
}

#[test]
fn voronoi_csv_grid() {
    let out = run(&[
        "voronoi", "--a", "-0.25", "--tmin", "512", "--y", "32", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,delta,r_a1,residual");
    assert_eq!(lines.len(), 257);
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        // residual is exactly delta - r_a1 as printed
        assert!((cols[1] - cols[2] - cols[3]).abs() < 1e-9);
    }
}

#[test]
fn report_is_a_markdown_table() {
    let out = run(&["report", "--a", "-0.25", "--k", "3", "--y", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("| quantity | value |"));
    assert!(text.lines().all(|l| l.starts_with('|') && l.ends_with('|')));
    assert!(text.contains("| delta | 0.035714285714 |"));
}
