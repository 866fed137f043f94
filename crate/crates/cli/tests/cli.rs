use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ostronet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ostronet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn interval_info_reports_both_lengths() {
    let v = json(&run(&["interval", "info", "--alpha", "surd:-1,1,5,2", "--m", "2", "--gamma", "0"]));
    assert_eq!(v["schema"], "ostronet.interval.v1");
    assert!(v["length"]["decimal"].as_str().unwrap().starts_with("0.6180339887"));
    assert_eq!(v["length"]["exact"], v["length_formula"]["exact"]);
    assert_eq!(v["length"]["precision"], "exact");
}

#[test]
fn malformed_alpha_exits_with_status_2() {
    let out = run(&["cf", "--alpha", "surd:1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn horizon_exhaustion_exits_with_status_3() {
    let out = run(&["cf", "--alpha", "dec:0.7182818284590452@50", "--depth", "60"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn ostrowski_encode_decode_round_trip() {
    let enc = json(&run(&["ostrowski", "encode", "--alpha", "surd:-1,1,2,1", "--n", "12345"]));
    let digits: Vec<String> = enc["digits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d.to_string())
        .collect();
    let dec = json(&run(&["ostrowski", "decode", "--alpha", "surd:-1,1,2,1", "--digits", &digits.join(",")]));
    assert_eq!(dec["n"], "12345");
}

#[test]
fn discrepancy_scan_is_bounded_and_deterministic() {
    let args = [
        "scan",
        "discrepancy",
        "--alpha",
        "surd:-1,1,2,1",
        "--levels",
        "1..8",
        "--max-N",
        "100000",
        "--format",
        "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
    let csv = String::from_utf8(a.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8 * 100);
    assert!(csv.starts_with("m,ell,length,max_le_10000,max_le_100000"));
    let summary: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(summary["growth"], false);
    assert_eq!(summary["schema"], "ostronet.discrepancy.v1");
}

#[test]
fn small_scan_runs_the_direct_oracle() {
    let v = json(&run(&["scan", "discrepancy", "--levels", "1,3", "--gammas", "0,5,17", "--max-N", "2000"]));
    assert_eq!(v["cells"].as_array().unwrap().len(), 6);
}

#[test]
fn interval_count_matches_direct_count() {
    let v = json(&run(&["interval", "count", "--m", "3", "--gamma", "0.3", "--n", "5000"]));
    assert_eq!(v["schema"], "ostronet.count.v1");
    assert!(v["count"].as_u64().unwrap() > 0);
}

#[test]
fn residual_scan_emits_csv() {
    let out = run(&["gaps", "scan-residual", "--m", "2", "--max-M", "20"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "M,n_M,residual");
    assert_eq!(rows.len(), 22);
    assert!(rows[3].starts_with("2,3,"));
}

#[test]
fn blocks_report_words_and_counts() {
    let v = json(&run(&["gaps", "blocks", "--m", "2", "--i", "3"]));
    let b3 = &v["blocks"][4];
    assert_eq!(b3["word"], "12112");
    assert_eq!(b3["s"], "3");
    assert_eq!(b3["r"], "2");
    assert_eq!(b3["span"], "8");
}

#[test]
fn net_generate_and_bd_verify() {
    let cfg = temp_file(
        "net1.json",
        r#"{"slopes":["surd:-1,1,5,2"],"window":{"intervals":[{"m":2,"gamma":"0"}]},"box":[[0,10]]}"#,
    );
    let out = run(&["net", "generate", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n1\n0\n2\n3\n5\n7\n8\n10\n");

    let v = json(&run(&["net", "bd-verify", "--config", cfg.to_str().unwrap(), "--box", "0:5000"]));
    assert_eq!(v["schema"], "ostronet.bd-report.v1");
    assert_eq!(v["injective"], true);
}

#[test]
fn multi_level_net_rejects_bd_map() {
    let cfg = temp_file(
        "net2.json",
        r#"{"slopes":["surd:-1,1,5,2","surd:-1,1,2,1"],"window":{"adjacent":[2,4,6]},"box":[[0,20],[0,3]]}"#,
    );
    let out = run(&["net", "bd-verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&run(&["net", "generate", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["count"].as_u64().unwrap() as usize, v["points"].as_array().unwrap().len());
}

#[test]
fn density_defect_is_labelled_as_sampled() {
    let cfg = temp_file(
        "net3.json",
        r#"{"slopes":["surd:-1,1,2,1"],"window":{"intervals":[{"m":3}]}}"#,
    );
    let v = json(&run(&["net", "density", "--config", cfg.to_str().unwrap(), "--rho", "256"]));
    assert_eq!(v["schema"], "ostronet.density-defect.v1");
    assert!(v["estimate"].as_str().unwrap().contains("sampled"));
}
