//! The `nmcode` binary: report schema, determinism and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nmcode(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmcode")).current_dir(dir).args(args).output().unwrap()
}

fn report(dir: &Path, out: &str) -> Value {
    serde_json::from_slice(&fs::read(dir.join(out).join("report.json")).unwrap()).unwrap()
}

fn without_time(mut v: Value) -> Value {
    let t = v["wall_time_s"].take();
    assert!(t.as_f64().unwrap() >= 0.0);
    v
}

#[test]
fn report_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let o = nmcode(dir.path(), &["--out", "o", "--seed", "2a", "lecss", "build", "--m", "4", "--n", "8", "--k", "4", "--k0", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let got = without_time(report(dir.path(), "o"));
    let golden: Value = serde_json::from_str(include_str!("golden/lecss_build_report.json")).unwrap();
    assert_eq!(got, without_time(golden));
    let written = fs::read(dir.path().join("o/lecss.json")).unwrap();
    assert_eq!(got["artifacts"][0]["sha256"], nmcode::cli::sha256_hex(&written));
}

#[test]
fn same_config_gives_identical_reports() {
    let runs: Vec<(Value, Vec<u8>)> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path();
            assert!(nmcode(p, &["--out", "plan", "--seed", "07", "concat", "plan", "--toy-inner-t", "4"]).status.success());
            fs::write(
                p.join("attack.json"),
                r#"{"operation": "concat.attack", "seed": "0b", "out": "attack", "jobs": 3,
                    "params": {"plan": "plan/plan.json", "adversaries": {"source": "canonical"}, "samples": 400,
                               "messages": {"messages": "sampled", "count": 4}}}"#,
            )
            .unwrap();
            let o = nmcode(p, &["--config", "attack.json", "--jobs", "1"]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            (without_time(report(p, "attack")), fs::read(p.join("attack/attack.csv")).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0].0["config"]["jobs"], 3, "config file wins over flags");
    let csv = String::from_utf8(runs[0].1.clone()).unwrap();
    assert!(csv.starts_with("adversary_id,case_class,eps_hat,radius,samples\nidentity,identity,0,"));
}

#[test]
fn identity_attack_row_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(nmcode(p, &["--out", "plan", "concat", "plan", "--toy-inner-t", "2"]).status.success());
    fs::write(p.join("adv.json"), format!(r#"[{{"id": "id", "tamper": {{"type": "bits", "actions": "{}"}}}}]"#, "K".repeat(40)))
        .unwrap();
    let o = nmcode(p, &["--out", "a", "concat", "attack", "--plan", "plan/plan.json", "--adversaries", "adv.json", "--samples", "0", "--max-eps", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(p, "a");
    assert_eq!(r["results"]["rows"][0]["eps_hat"], 0.0);
    assert_eq!(r["results"]["rows"][0]["samples"], 0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(nmcode(p, &["--out", "code", "inner", "sample", "--n", "10", "--k", "4", "--t", "8", "--delta-num", "1", "--delta-den", "10", "--unpacked"]).status.success());

    let ok = nmcode(p, &["--out", "v", "inner", "verify", "--code", "code/inner_code.bin", "--checks", "cube"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(report(p, "v")["pass"], true);

    let bad = nmcode(p, &["--out", "d", "inner", "verify", "--code", "code/inner_code.bin", "--checks", "detection"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("witness: "));
    assert_eq!(report(p, "d")["pass"], false);

    let malformed = nmcode(p, &["--out", "x", "inner", "sample", "--n", "4", "--k", "4", "--t", "8"]);
    assert_eq!(malformed.status.code(), Some(2));
    fs::write(p.join("bad.json"), r#"{"operation": "perm.test", "params": {"spec": 3}}"#).unwrap();
    assert_eq!(nmcode(p, &["--config", "bad.json"]).status.code(), Some(2));
    assert_eq!(nmcode(p, &["--config", "missing.json"]).status.code(), Some(2));
}

#[test]
fn extractor_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(nmcode(p, &["--out", "t", "nmext", "sample", "--n", "3", "--m", "1"]).status.success());
    assert_eq!(fs::read(p.join("t/extractor.bin")).unwrap().len(), 8);
    fs::write(p.join("f.json"), r#"{"type": "split", "f1": [1,2,3,4,5,6,7,0], "f2": [0,1,2,3,4,5,6,7]}"#).unwrap();
    let o = nmcode(p, &["--out", "c", "nmext", "check", "--table", "t/extractor", "--adversary", "f.json", "--x", "0,1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(p, "c");
    assert!(r["results"]["strict"]["error"].as_f64().unwrap() <= r["results"]["error"].as_f64().unwrap());
    assert_eq!(r["results"]["decomposition"]["holds"], true);
    let red = nmcode(p, &["--out", "r", "nmext", "reduce", "--table", "t/extractor", "--adversaries", "10"]);
    assert_eq!(red.status.code(), Some(0));
    assert_eq!(report(p, "r")["results"]["rows"].as_array().unwrap().len(), 12);
}
