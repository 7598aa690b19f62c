use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

fn frcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frcode"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("frcode-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

// built once; tests run in parallel
fn fano4() -> PathBuf {
    static PATH: OnceLock<PathBuf> = OnceLock::new();
    PATH.get_or_init(|| {
        let path = scratch("fano4.json");
        let out = frcode(&[
            "construct", "--family", "projective-plane", "--q", "2", "--union", "4", "-o",
            path.to_str().unwrap(),
        ]);
        stdout(&out);
        path
    })
    .clone()
}

fn petersen() -> PathBuf {
    static PATH: OnceLock<PathBuf> = OnceLock::new();
    PATH.get_or_init(|| {
        let path = scratch("petersen.json");
        stdout(&frcode(&["construct", "--family", "graph", "--graph", "petersen", "-o", path.to_str().unwrap()]));
        path
    })
    .clone()
}

#[test]
fn construct_fano_union() {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(fano4()).unwrap()).unwrap();
    assert_eq!((v["n"].as_u64(), v["theta"].as_u64()), (Some(28), Some(28)));
    assert_eq!((v["alpha"].as_u64(), v["rho"].as_u64()), (Some(3), Some(3)));
    assert_eq!(v["local_codes"].as_array().unwrap().len(), 4);
}

#[test]
fn construct_is_reproducible() {
    let args = ["construct", "--family", "affine", "--q", "3", "--m", "2"];
    assert_eq!(stdout(&frcode(&args)), stdout(&frcode(&args)));
}

#[test]
fn bound_report_for_fano_union() {
    let code = fano4();
    let v = json(&frcode(&["bound", "--code", code.to_str().unwrap(), "--M", "17", "--r", "3"]));
    assert_eq!(v["local_bound"]["value"], 22);
    assert_eq!(v["fr_local_bound"]["value"], 16);
    assert_eq!(v["mincor_bound"]["value"], 14);
    assert_eq!(v["greedy_bound"]["value"], 14);
    assert_eq!(v["exact_d_min"], 14);
    assert_eq!(v["fr_local_branches"], serde_json::json!([14, 16]));
}

#[test]
fn bound_writes_greedy_trace() {
    let code = fano4();
    let trace = scratch("trace.json");
    let out = frcode(&[
        "bound", "--code", code.to_str().unwrap(), "--M", "17", "--r", "3", "--format", "csv", "--trace",
        trace.to_str().unwrap(),
    ]);
    let csv = stdout(&out);
    assert!(csv.contains("mincor,14,true"));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(t["bound"], 14);
    assert_eq!(t["trace"][0]["b"], 0);
}

#[test]
fn analyze_petersen() {
    let code = petersen();
    let v = json(&frcode(&["analyze", "--code", code.to_str().unwrap(), "--k", "5"]));
    assert_eq!(v["a_k"]["value"], 10);
    assert_eq!(v["a_k"]["exact"], true);
    assert_eq!(v["rate"], "1/3");
    assert_eq!(v["d_min"]["value"], 6);
    assert_eq!(v["resilience"]["value"]["value"], 2);
    assert_eq!(v["local_resilience"]["value"]["value"], 1);
}

#[test]
fn analyze_marks_budget_overruns() {
    let code = fano4();
    let v = json(&frcode(&[
        "analyze", "--code", code.to_str().unwrap(), "--budget", "1000", "--approx-samples", "50",
    ]));
    let row = &v["profile"][13];
    assert_eq!(row["exact"], false);
    assert!(row["lower"].as_u64().unwrap() <= row["upper"].as_u64().unwrap());
    let table = stdout(&frcode(&[
        "analyze", "--code", code.to_str().unwrap(), "--budget", "1000", "--format", "table",
    ]));
    assert!(table.contains("approximate"));
}

#[test]
fn errors_are_json_on_stderr() {
    let code = petersen();
    let out = frcode(&["bound", "--code", code.to_str().unwrap(), "--M", "99", "--r", "3"]);
    assert!(!out.status.success());
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "file_too_large");

    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"name":"x","n":2,"theta":2,"alpha":1,"rho":1,"nodes":[[0],[0]]}"#).unwrap();
    let out = frcode(&["export", "--code", bad.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "json");

    let out = frcode(&["construct", "--family", "projective-plane", "--q", "6"]);
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "not_prime_power");
}

#[test]
fn usage_errors_exit_with_usage() {
    let out = frcode(&["construct"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = frcode(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_toml_scenario() {
    let cfg = scenarios().join("fano-union.toml");
    let events = scratch("events.jsonl");
    let args = ["simulate", "--config", cfg.to_str().unwrap(), "--events", events.to_str().unwrap()];
    let first = stdout(&frcode(&args));
    let log = std::fs::read_to_string(&events).unwrap();
    assert_eq!(first, stdout(&frcode(&args)));
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["local_repairs"], 200);
    assert_eq!(v["max_symbols_moved"], 3);
    assert_eq!(v["queries_succeeded"], 50);
    let line: Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    for key in ["tick", "event", "node", "helpers", "symbols_moved"] {
        assert!(line.get(key).is_some(), "{key}");
    }
}

#[test]
fn simulate_petersen_pairs_csv() {
    let cfg = scenarios().join("petersen-pairs.json");
    let csv = stdout(&frcode(&["simulate", "--config", cfg.to_str().unwrap(), "--format", "csv"]));
    assert!(csv.contains("repairs_succeeded,60\n"));
    assert!(csv.contains("lossy,true\n"));
}

#[test]
fn export_formats() {
    let code = petersen();
    let dot = stdout(&frcode(&["export", "--code", code.to_str().unwrap()]));
    assert_eq!(dot.matches(" -- ").count(), 30);
    let csv = stdout(&frcode(&["export", "--code", code.to_str().unwrap(), "--format", "csv"]));
    assert_eq!(csv.lines().count(), 11);
    let out = frcode(&["export", "--code", code.to_str().unwrap(), "--format", "table"]);
    assert!(!out.status.success());
}
