use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cauchy_dichotomy::files::{ReportDocument, SequenceFile};
use cauchy_dichotomy::Verdict;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cauchy-dichotomy"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(o: &Output, key: &str) -> String {
    let prefix = format!("{key} = ");
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&prefix).map(str::to_owned))
        .unwrap_or_else(|| panic!("no `{key}` in {}", stdout(o)))
}

fn scalar(o: &Output, key: &str) -> f64 {
    field(o, key).parse().unwrap()
}

#[test]
fn scalar_commands() {
    let o = run(&["chi", "0", "1", "0", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(scalar(&o, "chi"), 0.0);
    assert_eq!(scalar(&o, "kakutani_term"), 0.0);

    let o = run(&["kl", "0", "2", "0", "1"]);
    assert!((scalar(&o, "kl") - 1.125f64.ln()).abs() < 1e-15);
    assert_eq!(scalar(&o, "chi_eighth"), 0.0625);
    assert!(scalar(&o, "kakutani_term") <= scalar(&o, "half_kl"));

    let o = run(&["affinity", "0", "1", "0", "1"]);
    assert_eq!(scalar(&o, "affinity"), 1.0);

    let o = run(&["chi", "-3", "1", "0", "1"]);
    assert_eq!(scalar(&o, "chi"), 9.0);
}

#[test]
fn printed_values_round_trip_exactly() {
    let o = run(&["kl", "0.1", "0.3", "-0.7", "1.9"]);
    let z = cauchy_dichotomy::UHPoint::new(0.1, 0.3).unwrap();
    let w = cauchy_dichotomy::UHPoint::new(-0.7, 1.9).unwrap();
    assert_eq!(scalar(&o, "kl"), cauchy_dichotomy::kl_divergence(z, w));
}

#[test]
fn reduce_prints_canonical_form() {
    let o = run(&["reduce", "0", "2", "0", "1"]);
    assert_eq!(scalar(&o, "lambda"), 2.0);
    assert_eq!(field(&o, "act_w"), "[0.0000000000000000e0, 1.0000000000000000e0]");

    let o = run(&["reduce", "3", "4", "1", "2"]);
    let l = scalar(&o, "lambda");
    assert!(((l - 1.0).powi(2) / l - scalar(&o, "chi")).abs() < 1e-12);
    let act_z = field(&o, "act_z");
    let parts: Vec<f64> = act_z
        .trim_matches(['[', ']'])
        .split(", ")
        .map(|s| s.parse().unwrap())
        .collect();
    assert!(parts[0].abs() < 1e-10 * l && (parts[1] - l).abs() < 1e-10 * l);

    let o = run(&["reduce", "0", "1", "0", "1"]);
    assert_eq!(scalar(&o, "lambda"), 1.0);
}

#[test]
fn invalid_points_are_usage_errors() {
    for args in [
        ["chi", "0", "-1", "0", "1"],
        ["kl", "0", "1", "0", "0"],
        ["affinity", "nan", "1", "0", "1"],
        ["reduce", "0", "1", "inf", "1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["chi", "0", "1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn classify_decided_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    for (name, expected) in [
        ("inverse_square.toml", Verdict::Equivalent),
        ("constant_one.toml", Verdict::Singular),
    ] {
        let report = dir.path().join("report.json");
        let o = run(&[
            "classify",
            fixture(name).to_str().unwrap(),
            "--n-max",
            "4096",
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(field(&o, "verdict"), expected.to_string());
        let doc = ReportDocument::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(doc.report.verdict, expected);
        assert_eq!(doc.n_max, 4096);
    }
}

#[test]
fn classify_embedding_override_keeps_verdict() {
    let o = run(&[
        "classify",
        fixture("constant_one.toml").to_str().unwrap(),
        "--embedding",
        "scale",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&o, "verdict"), "singular");
}

#[test]
fn classify_observed_prefix_is_inconclusive() {
    let o = run(&["classify", fixture("observed_prefix.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&o, "verdict"), "inconclusive");
    assert_eq!(field(&o, "basis"), "numeric_heuristic");
}

#[test]
fn malformed_file_reports_line() {
    let o = run(&["classify", fixture("malformed.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 5"), "{err}");

    let o = run(&["classify", "/nonexistent/seq.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_null_sequence_is_zero() {
    let o = run(&[
        "simulate",
        fixture("null.toml").to_str().unwrap(),
        "--trials",
        "5",
        "--horizon",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,checkpoint,log_ratio_sum"));
    let rows: Vec<&str> = lines.take_while(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.ends_with(",0.0000000000000000e0")));
}

#[test]
fn simulate_horizon_beyond_explicit_rows_pads_with_equal_pairs() {
    let o = run(&[
        "simulate",
        fixture("null.toml").to_str().unwrap(),
        "--trials",
        "2",
        "--horizon",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn simulate_resource_cap() {
    let o = run(&[
        "simulate",
        fixture("constant_one.toml").to_str().unwrap(),
        "--trials",
        "100000",
        "--horizon",
        "100000",
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn simulate_rejects_empty_runs() {
    let o = run(&[
        "simulate",
        fixture("constant_one.toml").to_str().unwrap(),
        "--trials",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn family_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.toml");
    let o = run(&[
        "family",
        "--kind",
        "geometric",
        "--c",
        "0.3",
        "--r",
        "0.25",
        "--embedding",
        "scale",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed = SequenceFile::parse(&text).unwrap();
    assert_eq!(parsed.to_text(), text);
    let o = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(field(&o, "verdict"), "equivalent");

    let o = run(&["family", "--kind", "geometric", "--c", "1", "--r", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}
