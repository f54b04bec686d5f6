// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end runs of the `kernseg` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kernseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernseg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let csv = dir.join("signal.csv");
    let truth = dir.join("truth.json");
    let mut args = vec![
        "simulate",
        "--output",
        path_str(&csv),
        "--truth",
        path_str(&truth),
    ];
    args.extend_from_slice(extra);
    let out = kernseg(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    csv
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn starts(v: &Value) -> Vec<u64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect()
}

#[test]
fn ten_jumps_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = simulate(
        dir.path(),
        &[
            "--n",
            "2000",
            "--changes",
            "10",
            "--jump",
            "5",
            "--seed",
            "11",
        ],
    );
    let truth: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("truth.json")).unwrap())
            .unwrap();
    let report = json(&kernseg(&[
        "segment",
        "--input",
        path_str(&csv),
        "--dmax",
        "50",
    ]));

    let selection = &report["selection"];
    assert_eq!(selection["segments"], 11);
    assert_eq!(selection["method"], "slope_heuristic");
    let found = starts(&selection["starts"]);
    let expected = starts(&truth["starts"]);
    assert_eq!(found.len(), expected.len());
    for (f, e) in found.iter().zip(&expected) {
        assert!(f.abs_diff(*e) <= 2, "found {found:?}, truth {expected:?}");
    }
    assert_eq!(report["segmentations"].as_array().unwrap().len(), 50);
}

#[test]
fn single_segment_loss_is_the_whole_cost() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let values = [0.3, -1.2, 2.5, 0.0, 1.1, -0.4, 0.9];
    let text: String = std::iter::once("value".to_string())
        .chain(values.iter().map(f64::to_string))
        .map(|l| l + "\n")
        .collect();
    std::fs::write(&csv, text).unwrap();
    let report = json(&kernseg(&[
        "segment",
        "--input",
        path_str(&csv),
        "--dmax",
        "1",
        "--no-scale",
        "--kernel",
        "gaussian",
        "--delta",
        "2",
    ]));
    let n = values.len() as f64;
    let mut block = 0.0;
    for x in values {
        for y in values {
            block += (-(x - y) * (x - y) / 2.0).exp();
        }
    }
    let want = n - block / n;
    let entries = report["segmentations"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(starts(&entries[0]["starts"]), vec![1]);
    let loss = entries[0]["loss"].as_f64().unwrap();
    assert!((loss - want).abs() < 1e-12, "{loss} vs {want}");
    assert_eq!(report["selection"]["segments"], 1);
}

fn without_timing(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .filter(|l| !l.contains("_seconds"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn repeated_runs_are_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let csv = simulate(
        dir.path(),
        &[
            "--n",
            "400",
            "--scenario",
            "two-track",
            "--changes",
            "4",
            "--seed",
            "5",
        ],
    );
    for algorithm in ["exact", "lowrank-binseg"] {
        let args = [
            "segment",
            "--input",
            path_str(&csv),
            "--dmax",
            "20",
            "--algorithm",
            algorithm,
            "--per-coordinate",
        ];
        let (a, b) = (kernseg(&args), kernseg(&args));
        assert!(a.status.success());
        assert_eq!(without_timing(&a.stdout), without_timing(&b.stdout));
    }
}

#[test]
fn simulate_is_reproducible() {
    let a = kernseg(&["simulate", "--n", "300", "--seed", "9"]);
    let b = kernseg(&["simulate", "--n", "300", "--seed", "9"]);
    let c = kernseg(&["simulate", "--n", "300", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 300);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };

    let bad = write("bad.csv", "x\n1\n2\noops\n");
    let out = kernseg(&["segment", "--input", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let nan = write("nan.csv", "1\n2\nNaN\n4\n5\n");
    assert_eq!(
        kernseg(&["segment", "--input", path_str(&nan)])
            .status
            .code(),
        Some(2)
    );

    let ragged = write("ragged.csv", "1,2\n3\n");
    assert_eq!(
        kernseg(&["segment", "--input", path_str(&ragged)])
            .status
            .code(),
        Some(2)
    );

    let missing = dir.path().join("missing.csv");
    assert_eq!(
        kernseg(&["segment", "--input", path_str(&missing)])
            .status
            .code(),
        Some(2)
    );

    let small = write("small.csv", "1\n2\n3\n4\n5\n6\n");
    let out = kernseg(&[
        "segment",
        "--input",
        path_str(&small),
        "--dmax",
        "4",
        "--min-seg-len",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = kernseg(&["segment", "--input", path_str(&small), "--dmax", "7"]);
    assert_eq!(out.status.code(), Some(3));

    let out = kernseg(&[
        "segment",
        "--input",
        path_str(&small),
        "--dmax",
        "2",
        "--c1",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixed_constants_and_small_dmax() {
    let dir = tempfile::tempdir().unwrap();
    let csv = simulate(dir.path(), &["--n", "300", "--changes", "2", "--seed", "1"]);
    let report = json(&kernseg(&[
        "segment",
        "--input",
        path_str(&csv),
        "--dmax",
        "5",
        "--c1",
        "2",
        "--c2",
        "1",
    ]));
    assert_eq!(report["selection"]["method"], "fixed");
    assert_eq!(report["selection"]["segments"], 3);

    let out = kernseg(&["segment", "--input", path_str(&csv), "--dmax", "5"]);
    let report = json(&out);
    assert!(report["selection"].is_null());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn landmarks_are_ignored_on_the_exact_path() {
    let dir = tempfile::tempdir().unwrap();
    let csv = simulate(dir.path(), &["--n", "200", "--changes", "1"]);
    let report = json(&kernseg(&[
        "segment",
        "--input",
        path_str(&csv),
        "--dmax",
        "12",
        "--landmarks",
        "10",
    ]));
    assert!(report["landmarks"].is_null());
    assert!(report["warnings"][0].as_str().unwrap().contains("ignored"));
}

#[test]
fn lowrank_path_reports_its_features() {
    let dir = tempfile::tempdir().unwrap();
    let csv = simulate(dir.path(), &["--n", "500", "--changes", "3", "--seed", "2"]);
    let report = json(&kernseg(&[
        "segment",
        "--input",
        path_str(&csv),
        "--algorithm",
        "lowrank-binseg",
        "--dmax",
        "15",
        "--landmarks",
        "30",
        "--landmark-rule",
        "stride",
    ]));
    assert_eq!(report["algorithm"], "lowrank-binseg");
    assert_eq!(report["landmarks"]["rule"], "stride");
    assert_eq!(report["landmarks"]["requested"], 30);
    assert_eq!(report["selection"]["approximate_losses"], true);
    let losses: Vec<f64> = report["segmentations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["loss"].as_f64().unwrap())
        .collect();
    assert!(losses.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn bench_writes_csv_and_skips_over_budget() {
    let out = kernseg(&[
        "bench",
        "--n",
        "200,400",
        "--dmax",
        "5",
        "--landmarks",
        "10",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "algorithm,n,p,seconds,peak_table_bytes");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("exact,200,,"));
    assert!(lines[2].starts_with("lowrank-binseg,200,10,"));

    let out = kernseg(&[
        "bench",
        "--n",
        "200,400",
        "--dmax",
        "5",
        "--memory-budget",
        "20000",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipping"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() < 5);

    let out = kernseg(&["bench", "--n", "400,200"]);
    assert_eq!(out.status.code(), Some(2));
}
