use std::process::{Command, Output};

use serde_json::Value;

fn aopsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aopsynth")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_depth_instances() {
    let v = json(&aopsynth(&["solve", "--depth", "14", "--size-opt"]));
    assert_eq!(v["delay"], 5);
    assert_eq!(v["size"], 18);
    let v = json(&aopsynth(&["solve", "--depth", "20"]));
    assert_eq!(v["delay"], 6);
    let v = json(&aopsynth(&["solve", "--depth", "20", "--dual", "--scenario", "3"]));
    assert_eq!(v["delay"], 6);
}

#[test]
fn solve_inline_instance() {
    let v = json(&aopsynth(&["solve", "--gates", "A", "--arrival", "0,0"]));
    assert_eq!(v["delay"], 1);
    assert_eq!(v["size"], 1);
    let v = json(&aopsynth(&["solve", "--gates", "AO", "--arrival", "0,5,0", "--formula"]));
    assert_eq!(v["delay"], 7);
    assert!(v["formula"].as_str().unwrap().contains('∧'));
}

#[test]
fn fractional_arrival_routes_to_extension() {
    let bin = json(&aopsynth(&["solve", "--gates", "AOA", "--arrival", "0.3,1.5,0,0.7"]));
    let lin = json(&aopsynth(&[
        "solve", "--gates", "AOA", "--arrival", "0.3,1.5,0,0.7", "--fractional", "linear",
    ]));
    assert_eq!(bin["delay"], lin["delay"]);
    assert!(bin["alpha"].is_string());
    assert!(lin["inner_solves"].as_u64().unwrap() >= bin["inner_solves"].as_u64().unwrap());
}

#[test]
fn output_is_deterministic_without_timing() {
    let a = aopsynth(&["solve", "--depth", "12", "--no-timing", "--formula"]);
    let b = aopsynth(&["solve", "--depth", "12", "--no-timing", "--formula"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn infeasible_cap_reports_lower_bound() {
    let v = json(&aopsynth(&["solve", "--depth", "11", "--cap", "4"]));
    assert!(v["delay"].is_null());
    assert_eq!(v["lower_bound"], 5);
}

#[test]
fn exit_codes() {
    assert_eq!(aopsynth(&["solve", "--gates", "AX", "--arrival", "0,0,0"]).status.code(), Some(2));
    assert_eq!(aopsynth(&["solve", "--gates", "AO", "--arrival", "0,0"]).status.code(), Some(2));
    assert_eq!(aopsynth(&["solve", "--depth", "65"]).status.code(), Some(3));
    assert_eq!(aopsynth(&["solve", "--frobnicate"]).status.code(), Some(2));
    let slow = Command::new(env!("CARGO_BIN_EXE_aopsynth"))
        .args(["solve", "--depth", "30", "--scenario", "2"])
        .env("AOP_TIME_BUDGET_SECS", "0.05")
        .output()
        .unwrap();
    assert_eq!(slow.status.code(), Some(4));
}

#[test]
fn instance_file_and_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    std::fs::write(&inst, r#"{"gates":"AOOA","arrival":[1,0,2,0,0]}"#).unwrap();
    let circ = dir.path().join("c.json");
    let dot = dir.path().join("c.dot");
    let inst_s = inst.to_str().unwrap();
    let v = json(&aopsynth(&[
        "solve", "--instance", inst_s, "--circuit", circ.to_str().unwrap(), "--dot", dot.to_str().unwrap(),
    ]));
    let delay = v["delay"].as_u64().unwrap().to_string();
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let ok = aopsynth(&["verify", "--circuit", circ.to_str().unwrap(), "--instance", inst_s, "--delay", &delay]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // Flip one gate kind.
    let text = std::fs::read_to_string(&circ).unwrap();
    let flipped = if text.contains(r#""op":"and""#) {
        text.replacen(r#""op":"and""#, r#""op":"or""#, 1)
    } else {
        text.replacen(r#""op":"or""#, r#""op":"and""#, 1)
    };
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, flipped).unwrap();
    let out = aopsynth(&["verify", "--circuit", bad.to_str().unwrap(), "--instance", inst_s]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differs at"));
}

#[test]
fn standard_circuit_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("std.json");
    // t0 ∧ (t1 ∨ t2)
    std::fs::write(
        &circ,
        r#"{"nodes":[{"op":"in","idx":0},{"op":"in","idx":1},{"op":"in","idx":2},{"op":"or","l":1,"r":2},{"op":"and","l":0,"r":3}],"out":4}"#,
    )
    .unwrap();
    let out = aopsynth(&["verify", "--circuit", circ.to_str().unwrap(), "--gates", "AO", "--delay", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = aopsynth(&["verify", "--circuit", circ.to_str().unwrap(), "--gates", "AO", "--delay", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn adder_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&aopsynth(&["adder", "--bits", "8", "--dot-dir", dir.path().to_str().unwrap(), "--seed", "3"]));
    assert_eq!(v["depth"], 5);
    assert_eq!(v["reference_depth"], 5);
    assert_eq!(v["carries"].as_array().unwrap().len(), 8);
    assert!(dir.path().join("carry_8.dot").exists());
}

#[test]
fn table_text_and_json() {
    let out = aopsynth(&["table", "--max-m", "20", "--max-depth", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("bounded"));
    let v = json(&aopsynth(&["table", "--max-m", "20", "--max-depth", "8", "--json"]));
    let rows = v["rows"].as_array().unwrap();
    let starts: Vec<u64> = rows.iter().map(|r| r["start"].as_u64().unwrap()).collect();
    assert_eq!(starts, [2, 3, 4, 7, 11, 20, 39, 77]);
    assert_eq!(rows[5]["end_source"], "reference");
}

#[test]
fn bench_rows() {
    let v = json(&aopsynth(&["bench", "--from", "8", "--to", "10", "--scenarios", "1,2", "--json", "--jobs", "2"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let m = r["m"].as_u64().unwrap();
        match r["scenario"].as_u64().unwrap() {
            1 => assert_eq!(r["memo"].as_u64().unwrap(), (1 << m) - 1),
            _ => assert_eq!(r["memo"], [34, 55, 89][m as usize - 8]),
        }
    }
}

#[test]
fn count_diagnostics() {
    let v = json(&aopsynth(&["count", "--representatives", "12", "--q", "5"]));
    assert_eq!(v["representatives"]["count"], 233);
    assert_eq!(v["q"]["Q"], aop_synth::normalization::count_q(5));
    assert_eq!(v["q"]["R"], aop_synth::normalization::count_r(5));
}
