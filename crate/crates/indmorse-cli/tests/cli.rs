//! End-to-end runs of the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn indmorse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indmorse")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("indmorse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir.join(name)
}

#[test]
fn betti_of_a_long_cycle() {
    let out = indmorse(&["betti", "--family", "cycle:6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"total\":2"));

    let out = indmorse(&["betti", "--family", "cycle:6", "--field", "rational"]);
    assert!(stdout(&out).contains("\"total\":2"));
    assert!(stdout(&out).contains("\"field\":\"rational\""));
}

#[test]
fn bound_on_two_k5_copies_cross_checks() {
    let out = indmorse(&["bound", "--family", "k5-copies:2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"bound\":16"));
    assert!(text.contains("\"betti\":16"));
    assert!(text.contains("\"betti_leq_bound\":true"));
    assert!(text.contains("\"cap_holds\":true"));
    assert!(text.contains("\"theorem_cap\":\"126\""));
    assert!(text.contains("\"lemma\":\"DisjointProduct\""));
}

#[test]
fn bound_can_embed_the_matching() {
    let out = indmorse(&["bound", "--family", "complete:4", "--emit-matching"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"matching\""));
    assert!(text.contains("\"critical\""));
}

#[test]
fn matching_certificates_verify() {
    let out = indmorse(&["matching", "--family", "star:4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"pairs\""));
    assert!(text.contains("\"bound\":1"));
}

#[test]
fn lucas_sweep_prints_the_verified_line() {
    let out = indmorse(&["lucas-sweep", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "verified 243 sequences <= l(5)=11");
}

#[test]
fn verify_corollary_passes() {
    let out = indmorse(&["verify-corollary", "--kmax", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("126"));
    assert!(text.contains("5922"));
    assert!(text.contains("verified: exact bound >= 4^k"));
}

#[test]
fn bounds_subcommands() {
    let out = indmorse(&["bounds", "table", "--kmax", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("126"));
    assert!(text.contains("5922"));

    let out = indmorse(&["bounds", "planar", "--m", "1600"]);
    assert!(stdout(&out).contains("\"vacuous\":true"));
    let out = indmorse(&["bounds", "planar", "--m", "2500"]);
    assert!(stdout(&out).contains("\"vacuous\":false"));

    let out = indmorse(&["bounds", "threshold", "--n", "1073741824", "--chi", "4"]);
    let value: f64 = stdout(&out).trim().parse().expect("a number");
    assert!((value - 5.0 * f64::powf(2.0, 0.045)).abs() < 1e-9);
}

#[test]
fn analyze_reports_cycle_structure() {
    let out = indmorse(&["analyze", "--family", "petersen"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"girth\":5"));
    assert!(text.contains("\"packing_upper\":2"));
    assert!(text.contains("\"exact\":true"));
}

#[test]
fn exhaustive_corpus_passes() {
    let out = indmorse(&["verify-corpus", "--vertex-cap", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("morse-inequality"));
    assert!(text.contains("result: PASS"));
    assert!(!text.contains("counterexample"));
}

#[test]
fn sampled_corpus_is_deterministic() {
    let args =
        ["verify-corpus", "--sample", "40", "--vertex-cap", "7", "--seed", "9", "--matching-cap", "6"];
    let first = indmorse(&args);
    let second = indmorse(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let report = tmp("corpus.jsonl");
    let report2 = tmp("corpus2.jsonl");
    let mut with_output = args.to_vec();
    with_output.extend(["--output", report.to_str().unwrap()]);
    assert!(indmorse(&with_output).status.success());
    with_output.truncate(args.len());
    with_output.extend(["--output", report2.to_str().unwrap()]);
    assert!(indmorse(&with_output).status.success());
    let lines = std::fs::read_to_string(&report).unwrap();
    assert_eq!(lines, std::fs::read_to_string(&report2).unwrap());
    assert!(lines.lines().count() > 40, "header, rows, and suite lines");
    assert!(lines.contains("\"seed\":9"));
}

#[test]
fn empty_corpus_passes_with_warning() {
    let out = indmorse(&["verify-corpus", "--sample", "0"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr.clone()).unwrap().contains("empty corpus"));
    assert!(stdout(&out).contains("result: PASS"));
}

#[test]
fn corpus_rows_round_trip_through_graph6() {
    let report = tmp("roundtrip.jsonl");
    let out = indmorse(&[
        "verify-corpus",
        "--vertex-cap",
        "4",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let lines = std::fs::read_to_string(&report).unwrap();
    let mut checked = 0;
    for line in lines.lines().skip(1) {
        let row: serde_json::Value = line.parse().expect("json line");
        let Some(g6) = row.get("graph6").and_then(|v| v.as_str()) else { continue };
        let rerun = indmorse(&["bound", "--graph6", g6]);
        assert!(rerun.status.success(), "re-ingesting {g6}");
        let text = stdout(&rerun);
        let bound = row["bound"].as_u64().unwrap();
        assert!(text.contains(&format!("\"bound\":{bound}")));
        checked += 1;
    }
    assert!(checked >= 8, "every graph row re-ingested, got {checked}");
}

#[test]
fn edge_list_files_are_accepted() {
    let path = tmp("triangle.txt");
    std::fs::write(&path, "a b\nb c\nc a\n").unwrap();
    let out = indmorse(&["betti", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    // Ind(K3) is three isolated points
    assert!(stdout(&out).contains("\"total\":2"));
}

#[test]
fn restricted_rule_sets_still_certify() {
    let out =
        indmorse(&["bound", "--family", "complete:5", "--rules", "empty,isolated-vertex,link"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"bound\":4"));
    assert!(!text.contains("RemoveCycle"));
}

#[test]
fn input_errors_exit_two() {
    let out = indmorse(&["betti", "--family", "nosuch:3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = indmorse(&["betti", "--graph6", "!!!"]);
    assert_eq!(out.status.code(), Some(2));

    let out = indmorse(&["betti", "--input", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));

    let out = indmorse(&["lucas-sweep", "99"]);
    assert_eq!(out.status.code(), Some(2));

    let out = indmorse(&["bound", "--family", "cycle:5", "--rules", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_caps_exit_three() {
    let out = indmorse(&["betti", "--family", "forest-random:30,1", "--face-cap", "64"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_documents_every_family() {
    let out = indmorse(&["--help"]);
    let text = stdout(&out);
    for family in [
        "path:", "cycle:", "complete:", "star:", "biclique:", "petersen", "k5-copies:",
        "random-gnp:", "forest-random:",
    ] {
        assert!(text.contains(family), "family {family} missing from --help");
    }
}
