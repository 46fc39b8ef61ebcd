//! End-to-end tests of the command-line binary: exit codes, JSON content and
//! byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("holonomy-forge-test-{}-{name}", std::process::id()));
    p
}

fn read_json(path: &PathBuf) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("output file written");
    serde_json::from_str(&text).expect("valid JSON")
}

#[test]
fn structures_g2_lists_seven_form_terms() {
    let out = tmp_path("g2.json");
    let output = run(&["structures", "--group", "g2", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let doc = read_json(&out);
    assert_eq!(doc["schema"], "holonomy-forge/1");
    let terms = doc["table"]["forms"][0]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 7);
    assert_eq!(terms[0]["indices"].as_array().unwrap().len(), 3);
    std::fs::remove_file(out).ok();
}

#[test]
fn structures_spin9_reports_clifford_relations() {
    let out = tmp_path("spin9.json");
    let output = run(&["structures", "--group", "spin9", "--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let doc = read_json(&out);
    let checks = doc["checks"].as_array().unwrap();
    let anticommutators = checks
        .iter()
        .filter(|c| c["kind"] == "anticommutator")
        .count();
    assert_eq!(anticommutators, 36);
    assert!(checks.iter().all(|c| c["pass"].as_bool().unwrap()));
    std::fs::remove_file(out).ok();
}

#[test]
fn structures_rejects_u1() {
    let output = run(&["structures", "--group", "u", "--n", "1"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn structures_corrupt_phi_hook_fails_with_code_2() {
    let out = tmp_path("g2-corrupt.json");
    let output = run(&[
        "structures",
        "--group",
        "g2",
        "--corrupt-phi",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let doc = read_json(&out);
    assert_eq!(doc["pass"], false);
    // The flipped sign destroys the exceptional stabilizer.
    assert_ne!(doc["algebra_dim_computed"], 14);
    std::fs::remove_file(out).ok();
}

#[test]
fn special_so5_definition1() {
    let out = tmp_path("so5.json");
    let output = run(&[
        "special", "--group", "so", "--n", "5", "--definition", "1", "--trials", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = read_json(&out);
    assert_eq!(doc["found_dim"], 5);
    assert_eq!(doc["expected_dim"], 5);
    std::fs::remove_file(out).ok();
}

#[test]
fn special_spsp1_definition1() {
    let output = run(&[
        "special", "--group", "spsp1", "--n", "2", "--definition", "1", "--trials", "5",
    ]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn special_rejects_definition_3() {
    let output = run(&["special", "--group", "so", "--n", "5", "--definition", "3"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn counterexample_frozen_gap_values() {
    let out = tmp_path("ce1.json");
    let output = run(&[
        "counterexample", "--example", "1", "--r", "0.6", "--steps", "20000", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = read_json(&out);
    let gap = doc["entries"][0]["gap_numeric"].as_f64().unwrap();
    assert!((gap - 0.4145898).abs() < 1e-6, "gap {gap}");
    std::fs::remove_file(out).ok();

    let out = tmp_path("ce2.json");
    let output = run(&[
        "counterexample", "--example", "2", "--r", "0.6", "--steps", "20000", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let doc = read_json(&out);
    let gap = doc["entries"][0]["gap_numeric"].as_f64().unwrap();
    assert!((gap - 0.1194018).abs() < 1e-6, "gap {gap}");
    assert_eq!(doc["entries"][0]["verdict"], "VIOLATED");
    std::fs::remove_file(out).ok();
}

#[test]
fn counterexample_rejects_radius_one() {
    let output = run(&["counterexample", "--example", "1", "--r", "1.0"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn counterexample_rejects_example_3() {
    let output = run(&["counterexample", "--example", "3", "--r", "0.5", "--steps", "20000"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn full_report_is_byte_deterministic() {
    let out1 = tmp_path("full1.json");
    let out2 = tmp_path("full2.json");
    let args = |out: &PathBuf| -> Vec<String> {
        vec![
            "full-report".into(),
            "--trials".into(),
            "2".into(),
            "--seed".into(),
            "99".into(),
            "--steps".into(),
            "20000".into(),
            "--r".into(),
            "0.5,0.6".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let run_once = |out: &PathBuf| {
        let output = Command::new(env!("CARGO_BIN_EXE_holonomy-forge"))
            .args(args(out))
            .output()
            .expect("binary runs");
        assert_eq!(output.status.code(), Some(0), "{output:?}");
    };
    run_once(&out1);
    run_once(&out2);
    let bytes1 = std::fs::read(&out1).unwrap();
    let bytes2 = std::fs::read(&out2).unwrap();
    assert_eq!(bytes1, bytes2, "same config and seed must give identical bytes");

    let doc = read_json(&out1);
    for section in [
        "structures",
        "algebras",
        "special_def1",
        "special_def2",
        "examples",
        "covering",
        "theorem1_table",
    ] {
        assert_eq!(
            doc["sections"][section]["pass"], true,
            "section {section} must pass"
        );
    }
    std::fs::remove_file(out1).ok();
    std::fs::remove_file(out2).ok();
}

#[test]
fn full_report_corrupt_phi_exits_2() {
    let output = run(&[
        "full-report",
        "--trials",
        "1",
        "--steps",
        "20000",
        "--r",
        "0.6",
        "--corrupt-phi",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("structures       FAIL"), "{stdout}");
}
