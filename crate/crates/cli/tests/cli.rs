use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ginibre_core::theory::{overlap_ginue, overlap_limit_bulk, overlap_limit_depletion, ComplexPoint};

fn ginibre(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ginibre"))
        .current_dir(dir)
        .env_remove("GINIBRE_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = ginibre(dir, args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

/// `(abscissa, value)` pairs of a theory CSV.
fn curve(path: &Path) -> Vec<(f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn sample_writes_a_consistent_header() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "--ensemble", "ginoe", "--n", "50", "--samples", "20", "--seed", "4", "--out", "r.jsonl"]);
    let text = fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["n"], 50);
    assert_eq!(header["samples"], 20);
    assert_eq!(header["master_seed"], 4);
    assert_eq!(header["format"], "ginibre-records");
    let rejected = header["rejections"].as_u64().unwrap() as usize;
    assert_eq!(text.lines().count(), 1 + 50 * (20 - rejected));
    assert!(dir.path().join("r.jsonl.config.json").exists());
}

#[test]
fn reruns_and_thread_counts_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["sample", "--ensemble", "ginue", "--n", "12", "--samples", "300", "--seed", "9", "--out", out];
    ok(dir.path(), &args("a.jsonl"));
    ok(dir.path(), &args("b.jsonl"));
    let mut single = vec!["--threads", "1"];
    single.extend(args("c.jsonl"));
    ok(dir.path(), &single);
    let a = fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.jsonl")).unwrap());
    assert_eq!(a, fs::read(dir.path().join("c.jsonl")).unwrap());
}

#[test]
fn replay_reproduces_the_output() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "--ensemble", "ginoe", "--n", "8", "--samples", "50", "--seed", "2", "--out", "r.jsonl"]);
    let first = fs::read(dir.path().join("r.jsonl")).unwrap();
    fs::remove_file(dir.path().join("r.jsonl")).unwrap();
    ok(dir.path(), &["replay", "r.jsonl.config.json"]);
    assert_eq!(first, fs::read(dir.path().join("r.jsonl")).unwrap());
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["sample", "--ensemble", "ginoe", "--n", "10", "--samples", "0", "--out", "x"],
        &["sample", "--ensemble", "gue", "--n", "10", "--samples", "5", "--out", "x"],
        &["theory", "--curve", "depletion-limit", "--ensemble", "ginue", "--from", "0.5", "--to", "2", "--out", "x"],
        &["theory", "--curve", "finite-jpdf", "--ensemble", "ginoe", "--from", "1", "--to", "2", "--out", "x"],
        &["verify", "specfun", "--tolerance", "2"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(code(&ginibre(dir.path(), args)), 1, "{args:?}");
    }
    assert!(!dir.path().join("x").exists());
    assert_eq!(code(&ginibre(dir.path(), &["--help"])), 0);
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = ginibre(dir.path(), &["sample", "--ensemble", "ginoe", "--n", "4", "--samples", "2", "--out", "missing/r.jsonl"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&ginibre(dir.path(), &["replay", "nowhere.json"])), 2);
}

#[test]
fn theory_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["theory", "--curve", "overlap", "--ensemble", "ginue", "--n", "2", "--from", "0", "--to", "3", "--points", "7", "--out", "o.csv"]);
    let rows = curve(&dir.path().join("o.csv"));
    assert_eq!(rows.len(), 7);
    for (r, v) in rows {
        assert_eq!(v, overlap_ginue(2, ComplexPoint::new(0.0, r)).unwrap());
    }

    ok(dir.path(), &["theory", "--curve", "bulk-limit", "--from", "0", "--to", "1.5", "--points", "16", "--angle", "0.3", "--out", "b.csv"]);
    for (w, v) in curve(&dir.path().join("b.csv")) {
        assert_eq!(v, overlap_limit_bulk(ComplexPoint::from_polar(w, 0.3)));
        if w > 1.0 {
            assert_eq!(v, 0.0);
        }
    }

    ok(dir.path(), &["theory", "--curve", "depletion-limit", "--from", "0.25", "--to", "4", "--points", "16", "--out", "d.csv"]);
    for (xi, v) in curve(&dir.path().join("d.csv")) {
        assert_eq!(v, overlap_limit_depletion(xi, None).unwrap());
    }
}

#[test]
fn figure_rejects_mismatched_records() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "--ensemble", "ginue", "--n", "10", "--samples", "10", "--out", "r.jsonl"]);
    for args in [
        &["figure", "fig3", "--records", "r.jsonl", "--ensemble", "ginoe", "--out", "f"][..],
        &["figure", "fig3", "--records", "r.jsonl", "--n", "20", "--out", "f"],
        &["figure", "fig5", "--records", "r.jsonl", "--out", "f"],
        &["figure", "fig3", "--records", "r.jsonl", "--samples", "5", "--out", "f"],
    ] {
        assert_eq!(code(&ginibre(dir.path(), args)), 1, "{args:?}");
    }
}

#[test]
fn small_figure_from_records_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sample", "--ensemble", "ginoe", "--n", "20", "--samples", "200", "--seed", "1", "--out", "r.jsonl"]);
    ok(dir.path(), &["figure", "fig3", "--records", "r.jsonl", "--out", "figs"]);
    let figs = dir.path().join("figs");
    for name in ["fig3_empirical.csv", "fig3_theory.csv", "fig3.gp", "fig3.config.json"] {
        assert!(figs.join(name).exists(), "{name}");
    }
    let empirical = fs::read_to_string(figs.join("fig3_empirical.csv")).unwrap();
    assert!(empirical.lines().any(|l| l.starts_with("series,")));
    assert!(fs::read_to_string(figs.join("fig3.gp")).unwrap().contains("fig3_theory.csv"));
    ok(dir.path(), &["replay", "figs/fig3.config.json"]);
    assert_eq!(empirical, fs::read_to_string(figs.join("fig3_empirical.csv")).unwrap());
}

#[test]
fn verify_specfun_reports_success() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["verify", "specfun", "--out", "report.json"]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn failed_verification_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // A z threshold this tight cannot be met by sampling noise.
    let out = ginibre(dir.path(), &["verify", "statistical", "--n", "12", "--samples", "400", "--tolerance", "1e-6", "--out", "report.json"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}
