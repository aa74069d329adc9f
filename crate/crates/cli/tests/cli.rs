//! End-to-end checks of the command-line interface: documented example
//! values, exit codes, and artifact determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn gwmast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwmast")).args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("gwmast-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn expect_unrooted_example_value() {
    let out = gwmast(&["expect", "--dist", "binary", "--n", "6", "--a", "3", "--model", "unrooted"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("20/3"), "missing 20/3 in: {}", stdout(&out));
}

#[test]
fn expect_branching_table_matches_closed_forms() {
    let out = gwmast(&["expect", "--dist", "binary", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // E at a=1 is n; at a=2 it is n(n-1)/4; at a=3 it is n(n-1)(n-2)/72.
    assert!(text.contains("6\t1\t6\t"), "a=1 row wrong: {text}");
    assert!(text.contains("6\t2\t15/2\t"), "a=2 row wrong: {text}");
    assert!(text.contains("6\t3\t5/3\t"), "a=3 row wrong: {text}");
}

#[test]
fn bounds_binary_constants() {
    let out = gwmast(&["bounds", "--dist", "binary"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1.359140"), "c should be e/2: {text}");
    assert!(text.contains("chi     = 1"), "chi should be 1: {text}");
}

#[test]
fn prob_binary_cherry_is_one_half() {
    let out = gwmast(&["prob", "--dist", "binary", "--shape", "(1,2)", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("P(shape | leaves)   1/2"), "got: {}", stdout(&out));
}

#[test]
fn verify_suite_passes_and_prints_checks() {
    let out = gwmast(&["verify", "--suite", "hosts", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("[hosts]"), "missing check lines: {text}");
    assert!(text.contains("0 failed"), "missing summary: {text}");
}

#[test]
fn verify_rejects_unknown_suite() {
    let out = gwmast(&["verify", "--suite", "nosuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mast_examples() {
    let out = gwmast(&["mast", "((1,2),(3,4))", "(((1,2),3),4)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("size: 3"), "got: {}", stdout(&out));
    let out = gwmast(&["mast", "((1,2),(3,4))", "((1,2),(3,4))"]);
    assert!(stdout(&out).contains("size: 4"), "got: {}", stdout(&out));
}

#[test]
fn sample_draws_are_seeded_and_batch_independent() {
    let batch = gwmast(&["sample", "--dist", "d2test", "--n", "5", "--count", "3", "--seed", "9"]);
    assert_eq!(batch.status.code(), Some(0));
    let again = gwmast(&["sample", "--dist", "d2test", "--n", "5", "--count", "3", "--seed", "9"]);
    assert_eq!(stdout(&batch), stdout(&again));
    let single = gwmast(&["sample", "--dist", "d2test", "--n", "5", "--seed", "9"]);
    assert_eq!(stdout(&single), stdout(&batch).lines().next().unwrap().to_string() + "\n");
    let trees = stdout(&batch);
    for line in trees.lines() {
        // Each line is a tree over labels 1..=5 in the text grammar.
        assert!(line.starts_with('('), "not a tree: {line}");
        for label in 1..=5 {
            assert!(line.contains(&label.to_string()), "missing leaf {label}: {line}");
        }
    }
}

#[test]
fn json_artifacts_are_byte_deterministic() {
    let first = temp_path("det-1.json");
    let second = temp_path("det-2.json");
    for path in [&first, &second] {
        let out = gwmast(&[
            "prob", "--dist", "d2test", "--shape", "(1,2)", "--n", "4", "--trials", "2000",
            "--seed", "5", "--json", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert!(!a.is_empty() && a == b, "JSON artifacts differ");
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\"exact\": \"27/110\""), "missing exact value: {text}");
    std::fs::remove_file(&first).ok();
    std::fs::remove_file(&second).ok();
}

#[test]
fn csv_artifacts_embed_the_manifest() {
    let path = temp_path("table.csv");
    let out = gwmast(&[
        "expect", "--dist", "binary", "--n", "6", "--a", "3", "--csv", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let manifest_line = lines.next().unwrap();
    assert!(manifest_line.starts_with("# manifest: {"), "bad manifest line: {manifest_line}");
    assert_eq!(lines.next().unwrap(), "n,a,value,stderr");
    assert_eq!(lines.next().unwrap(), "6,3,5/3,");
    std::fs::remove_file(&path).ok();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gwmast(&["bounds", "--dist", "nosuch"]).status.code(), Some(2));
    assert_eq!(gwmast(&["gf"]).status.code(), Some(2)); // --order is required
    assert_eq!(gwmast(&["prob", "--shape", "(1,2", "--n", "3"]).status.code(), Some(2));
    assert_eq!(gwmast(&["expect", "--n", "6", "--model", "unrooted", "--trials", "10"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_three() {
    assert_eq!(gwmast(&["bounds", "--config", "/nonexistent/offspring.toml"]).status.code(), Some(3));
    let out = gwmast(&["gf", "--order", "2", "--json", "/nonexistent-dir/out.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_distributions_match_the_built_ins() {
    let path = temp_path("offspring.toml");
    std::fs::write(&path, "[offspring]\n0 = \"7/12\"\n2 = \"1/4\"\n3 = \"1/6\"\n").unwrap();
    let from_file = gwmast(&[
        "prob", "--config", path.to_str().unwrap(), "--shape", "(1,2)", "--n", "4",
    ]);
    assert_eq!(from_file.status.code(), Some(0));
    let built_in = gwmast(&["prob", "--dist", "d2test", "--shape", "(1,2)", "--n", "4"]);
    assert_eq!(stdout(&from_file), stdout(&built_in));
    std::fs::remove_file(&path).ok();
}
