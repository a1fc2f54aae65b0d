use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regen-sim"))
        .args(args)
        .current_dir(dir)
        .env_remove("REGEN_SEED")
        .output()
        .expect("run regen-sim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn init(dir: &Path, mode: &str, bytes: usize) -> Output {
    let data: Vec<u8> = (0..bytes).map(|i| (i * 13 + 5) as u8).collect();
    fs::write(dir.join("in.bin"), data).unwrap();
    sim(dir, &["init", "--n", "12", "--k", "8", "--d", "10", "--r", "2", "--mode", mode, "--file", "in.bin", "--out", "s.json"])
}

#[test]
fn init_prints_the_operating_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = init(dir.path(), "mbr", 1000);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("alpha: 10\n") && text.contains("B: 56\n") && text.contains("m: 100\n"), "{text}");
    assert!(text.contains("storage per node: 5M/28") && text.contains("bandwidth per failed node: 5M/28"), "{text}");

    let out = init(dir.path(), "interior", 1000);
    let text = stdout(&out);
    assert!(text.contains("B: 52\n") && text.contains("m: 80\n"), "{text}");
    assert!(text.contains("storage per node: 2M/13") && text.contains("bandwidth per failed node: 5M/26"), "{text}");
}

#[test]
fn parameter_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("in.bin"), b"x").unwrap();
    let out = sim(dir.path(), &["init", "--n", "12", "--k", "8", "--d", "10", "--r", "3", "--file", "in.bin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("r does not divide k"));

    let out = sim(dir.path(), &["tradeoff", "--n", "12", "--k", "8", "--d", "6", "--r", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_state_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = sim(dir.path(), &["verify", "--state", "absent.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn repair_updates_state_and_appends_trace() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 500);
    let out = sim(dir.path(), &["repair", "--state", "s.json", "--fail", "11,12", "--trace", "t.jsonl"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("bandwidth_symbols: 20\n"));
    assert!(stdout(&out).contains("bandwidth_bits: 16000\n"));

    let out = sim(dir.path(), &["repair", "--state", "s.json", "--random", "--trace", "t.jsonl"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let trace = fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
    let lines: Vec<Value> = trace.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["event"] == "round" && l["round"]["bandwidth_symbols"] == 20));

    let state: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(state["history"].as_array().unwrap().len(), 3);
    assert!(!dir.path().join("s.json.lock").exists());

    let out = sim(dir.path(), &["repair", "--state", "s.json", "--fail", "11,13"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_failures_follow_the_state_seed() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 100);
    fs::copy(dir.path().join("s.json"), dir.path().join("t.json")).unwrap();
    let a = sim(dir.path(), &["repair", "--state", "s.json", "--random"]);
    let b = sim(dir.path(), &["repair", "--state", "t.json", "--random"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn held_lock_blocks_mutation() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 100);
    fs::write(dir.path().join("s.json.lock"), b"").unwrap();
    let out = sim(dir.path(), &["repair", "--state", "s.json", "--fail", "1,2"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("lock"));
}

#[test]
fn collect_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 700);
    let out = sim(dir.path(), &["collect", "--state", "s.json", "--nodes", "1,2,3,4,5,6,7,8", "--out", "o.bin"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("verdict: bit-exact"));
    assert_eq!(fs::read(dir.path().join("o.bin")).unwrap(), fs::read(dir.path().join("in.bin")).unwrap());

    let out = sim(dir.path(), &["collect", "--state", "s.json", "--all-subsets", "--sample", "12"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("bit_exact: 12\n"));

    let out = sim(dir.path(), &["collect", "--state", "s.json", "--nodes", "1,2,3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn striped_files_survive_no_oracle_repair() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 12_000);
    let out = sim(dir.path(), &["repair", "--state", "s.json", "--fail", "11,12", "--no-oracle"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = sim(dir.path(), &["collect", "--state", "s.json", "--nodes", "3,4,5,6,7,8,11,12", "--out", "o.bin"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(dir.path().join("o.bin")).unwrap().len(), 12_000);
}

#[test]
fn verify_report_and_exit_code_agree() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 300);
    let checks = ["--checks", "l1,l2,l3,l4,dc"];
    let out = sim(dir.path(), &[&["verify", "--state", "s.json", "--report", "r.json"][..], &checks].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["reports"].as_array().unwrap().len(), 5);

    sim(dir.path(), &["repair", "--state", "s.json", "--fail", "11,12"]);
    let out = sim(dir.path(), &[&["verify", "--state", "s.json"][..], &checks].concat());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    // Forced failure: node 2 becomes a copy of node 1.
    let mut state: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let node1 = state["nodes"][0].clone();
    state["nodes"][1]["stored"] = node1["stored"].clone();
    state["nodes"][1]["codeword"] = node1["codeword"].clone();
    fs::write(dir.path().join("bad.json"), state.to_string()).unwrap();
    let out = sim(dir.path(), &["verify", "--state", "bad.json", "--checks", "l1"]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["reports"][0]["violations"][0]["groups"], serde_json::json!([[1], [2]]));
}

#[test]
fn tradeoff_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = sim(dir.path(), &["tradeoff", "--n", "12", "--k", "8", "--d", "10", "--r", "2", "--out", "t.csv"]);
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "mode,alpha_symbols,gamma_symbols,alpha_norm,gamma_per_failed_norm");
    assert_eq!(lines[1], "mbr,10,20,0.17857,0.17857");
    assert_eq!(lines[2], "interior,8,20,0.15385,0.19231");
    assert!(lines[3].starts_with("msr-reference,"));
}

#[test]
fn longevity_zero_rounds_is_a_build_check() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 400);
    let out = sim(dir.path(), &["longevity", "--state", "s.json", "--rounds", "0", "--collect-samples", "5", "--seed", "3", "--summary", "sum.json"]);
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("sum.json")).unwrap()).unwrap();
    assert_eq!(summary["summary"]["rounds_requested"], 0);
    assert_eq!(summary["summary"]["collections_bit_exact"], 5);
    assert_eq!(summary["summary"]["checkpoints"].as_array().unwrap().len(), 1);
    // The checkpoint runs every check, so the exit code tracks the summary verdict.
    let passed = summary["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 3 }));
}

#[test]
fn longevity_trace_has_one_line_per_round() {
    let dir = tempfile::tempdir().unwrap();
    init(dir.path(), "mbr", 400);
    sim(dir.path(), &["longevity", "--state", "s.json", "--rounds", "4", "--collect-samples", "2", "--limit", "20", "--trace", "t.jsonl"]);
    let trace = fs::read_to_string(dir.path().join("t.jsonl")).unwrap();
    assert_eq!(trace.lines().count(), 4);
    for line in trace.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v["event"] == "round" || v["event"] == "aborted");
    }
}
