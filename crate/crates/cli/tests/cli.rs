//! End-to-end runs of the stpstab binary against the bundled network files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn network(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../networks").join(name)
}

fn stpstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stpstab")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[rustfmt::skip]
const BCN4_MF: [usize; 64] = [
    2, 4, 4, 2, 2, 4, 4, 2, 3, 7, 1, 5, 3, 7, 1, 5,
    1, 7, 3, 5, 1, 7, 3, 5, 4, 8, 2, 6, 4, 8, 2, 6,
    2, 4, 4, 2, 10, 12, 12, 10, 3, 7, 1, 5, 11, 15, 9, 13,
    1, 7, 3, 5, 9, 15, 11, 13, 4, 8, 2, 6, 12, 16, 10, 14,
];

#[test]
fn compile_emits_the_transition_matrix() {
    let bcn4 = network("bcn4.net");
    let out = stpstab(&["compile", bcn4.to_str().unwrap()]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    let m_f: Vec<usize> =
        json["M_F"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
    assert_eq!(m_f, BCN4_MF);
    assert_eq!(json["N"], 16);
    assert_eq!(json["M"], 4);
}

#[test]
fn compile_mix_valued_header() {
    let out = stpstab(&["compile", network("mix23.net").to_str().unwrap()]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["N"], 6);
    assert_eq!(json["M"], 3);
    assert_eq!(json["radices"]["states"], serde_json::json!([2, 3]));
}

#[test]
fn compile_rejects_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.net");
    std::fs::write(&bad, "network broken\nstate X :\n").unwrap();
    let out = stpstab(&["compile", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn stabilize_point_case() {
    let bcn4 = network("bcn4.net");
    let out = stpstab(&["stabilize", bcn4.to_str().unwrap(), "--point", "1,1,0,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["solvable"], true);
    assert_eq!(json["count"], "1024");
    assert_eq!(json["convergence_time"], 3);
    assert_eq!(json["layers"].as_array().unwrap().len(), 4);
    assert_eq!(json["layers"][3], serde_json::json!([1, 4, 11, 12]));
    assert_eq!(json["per_state_reach_time"][2], 0);
}

#[test]
fn stabilize_by_index_matches_tuple_form() {
    let bcn4 = network("bcn4.net");
    let by_tuple =
        stdout_json(&stpstab(&["stabilize", bcn4.to_str().unwrap(), "--point", "1,1,0,1"]));
    let by_index = stdout_json(&stpstab(&["stabilize", bcn4.to_str().unwrap(), "--index", "3"]));
    assert_eq!(by_tuple, by_index);
}

#[test]
fn stabilize_set_case_inline_and_file() {
    let bcn4 = network("bcn4.net");
    let inline = "{(1,0,1,0),(1,0,0,1),(0,1,0,0)}";
    let out = stpstab(&["stabilize", bcn4.to_str().unwrap(), "--set", inline]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["count"], "6144");
    assert_eq!(json["core_W0"], serde_json::json!([6, 7, 12]));

    let dir = tempfile::tempdir().unwrap();
    let set_file = dir.path().join("target.set");
    std::fs::write(&set_file, "# one state per line, tuple or index\n(1,0,1,0)\n7\n0,1,0,0\n")
        .unwrap();
    let from_file = stdout_json(&stpstab(&[
        "stabilize",
        bcn4.to_str().unwrap(),
        "--set",
        set_file.to_str().unwrap(),
    ]));
    assert_eq!(json, from_file);
}

#[test]
fn stabilize_reports_unsolvable_with_exit_2() {
    let out = stpstab(&["stabilize", network("negation.net").to_str().unwrap(), "--point", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let json = stdout_json(&out);
    assert_eq!(json["solvable"], false);
    assert_eq!(json["reason"], "NotFixedPoint");
}

#[test]
fn stabilize_writes_json_and_dot_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let dot_path = dir.path().join("loop.dot");
    let out = stpstab(&[
        "stabilize",
        network("bcn4.net").to_str().unwrap(),
        "--point",
        "1,1,0,1",
        "--json",
        json_path.to_str().unwrap(),
        "--dot",
        dot_path.to_str().unwrap(),
        "--enumerate",
        "5",
    ]);
    assert!(out.status.success());
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(saved, stdout_json(&out));
    assert_eq!(saved["enumerated_laws"].as_array().unwrap().len(), 5);
    let dot = std::fs::read_to_string(&dot_path).unwrap();
    assert_eq!(dot.matches("->").count(), 16);
    assert!(dot.contains("s3 [label=\"3 (1,1,0,1)\" peripheries=2"));
}

#[test]
fn compiled_json_reingests_identically() {
    let dir = tempfile::tempdir().unwrap();
    let compiled_path = dir.path().join("bcn4.json");
    let out = stpstab(&["compile", network("bcn4.net").to_str().unwrap()]);
    std::fs::write(&compiled_path, &out.stdout).unwrap();

    let from_dsl = stdout_json(&stpstab(&[
        "stabilize",
        network("bcn4.net").to_str().unwrap(),
        "--index",
        "3",
    ]));
    let from_json =
        stdout_json(&stpstab(&["stabilize", compiled_path.to_str().unwrap(), "--index", "3"]));
    assert_eq!(from_dsl, from_json);
}

#[test]
fn verify_known_law_passes() {
    let dir = tempfile::tempdir().unwrap();
    let law = dir.path().join("known.law");
    std::fs::write(&law, "1 2 4 2 4 2 2 4 3 3 2 4 1 1 3 3\n").unwrap();
    let out = stpstab(&[
        "verify",
        network("bcn4.net").to_str().unwrap(),
        "--law",
        law.to_str().unwrap(),
        "--point",
        "1,1,0,1",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["pass"], true);
    assert_eq!(json["violated_states"], serde_json::json!([]));
}

#[test]
fn verify_flags_bad_control_choice() {
    let dir = tempfile::tempdir().unwrap();
    let law = dir.path().join("bad.law");
    // state 3 must use a control in {2,4}; control 1 breaks the fixed point
    std::fs::write(&law, "1 2 1 2 4 2 2 4 3 3 2 4 1 1 3 3\n").unwrap();
    let out = stpstab(&[
        "verify",
        network("bcn4.net").to_str().unwrap(),
        "--law",
        law.to_str().unwrap(),
        "--index",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let json = stdout_json(&out);
    assert_eq!(json["pass"], false);
    assert!(json["violated_states"].as_array().unwrap().contains(&serde_json::json!(3)));
}

#[test]
fn verify_rejects_malformed_law_file() {
    let dir = tempfile::tempdir().unwrap();
    let law = dir.path().join("short.law");
    std::fs::write(&law, "1 2 3\n").unwrap();
    let out = stpstab(&[
        "verify",
        network("bcn4.net").to_str().unwrap(),
        "--law",
        law.to_str().unwrap(),
        "--index",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graph_from_law_marks_the_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    let law = dir.path().join("known.law");
    std::fs::write(&law, "1 2 4 2 4 2 2 4 3 3 2 4 1 1 3 3\n").unwrap();
    let out =
        stpstab(&["graph", network("bcn4.net").to_str().unwrap(), "--law", law.to_str().unwrap()]);
    assert!(out.status.success());
    let dot = String::from_utf8_lossy(&out.stdout);
    assert_eq!(dot.matches("[label=").count(), 16);
    assert!(dot.contains("s3 -> s3;"));
    // only the target is a self-loop
    let self_loops =
        (1..=16).filter(|x| dot.contains(&format!("s{x} -> s{x};"))).collect::<Vec<_>>();
    assert_eq!(self_loops, vec![3]);
}

#[test]
fn graph_from_report_shows_set_attractor_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = stpstab(&[
        "stabilize",
        network("bcn4.net").to_str().unwrap(),
        "--set",
        "{6,7,12}",
        "--json",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = stpstab(&[
        "graph",
        network("bcn4.net").to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dot = String::from_utf8_lossy(&out.stdout);
    // attractor states are drawn with a double border
    let marked: Vec<usize> = (1..=16)
        .filter(|x| {
            dot.contains(&format!("s{x} [label=\"{x} "))
                && dot
                    .lines()
                    .any(|l| l.contains(&format!("s{x} [")) && l.contains("peripheries=2"))
        })
        .collect();
    assert!(!marked.is_empty());
    // the attractor of any family member lies inside the invariant core
    for x in &marked {
        assert!([6usize, 7, 12].contains(x), "unexpected attractor node {x} in:\n{dot}");
    }
}

#[test]
fn graph_requires_exactly_one_source() {
    let out = stpstab(&["graph", network("bcn4.net").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn target_flags_are_mutually_exclusive() {
    let out = stpstab(&[
        "stabilize",
        network("bcn4.net").to_str().unwrap(),
        "--point",
        "1,1,0,1",
        "--index",
        "3",
    ]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn mix_valued_set_run() {
    let out =
        stpstab(&["stabilize", network("mix23.net").to_str().unwrap(), "--set", "{(1,0),(0,0)}"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["core_W0"], serde_json::json!([3, 6]));
    assert_eq!(json["selected_law"], serde_json::json!([3, 3, 3, 2, 2, 2]));
    assert_eq!(json["M_c"], serde_json::json!([3, 3, 6, 6, 6, 3]));
}
