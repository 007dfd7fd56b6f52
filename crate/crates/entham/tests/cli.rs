use std::path::PathBuf;
use std::process::Command;

use entham::cli::{help_text, run_with};
use entham::entropy::FractionalMatching;
use entham::hypergraph::Hypergraph;
use entham::report::{parse_csv_report, parse_json_report, RunManifest};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("entham").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entham-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn complete_file(n: usize, k: usize) -> PathBuf {
    let p = tmp(&format!("k{n}_{k}.txt"));
    Hypergraph::complete(n, k).write_edge_file(&p).unwrap();
    p
}

#[test]
fn help_matches_golden() {
    let golden = include_str!("golden/help.txt");
    assert_eq!(help_text().trim_end(), golden.trim_end());
}

#[test]
fn count_k6_is_60() {
    let f = complete_file(6, 3);
    let (code, out, _) = run(&["count", "--input", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "60");
}

#[test]
fn indivisible_ell_exits_2() {
    let f = complete_file(5, 3);
    let (code, _, err) = run(&["count", "--input", f.to_str().unwrap(), "--mode", "ell", "--ell", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("DivisibilityViolated"), "{err}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["count"]).0, 1);
    assert_eq!(run(&["count", "--input", "x", "--mode", "nope"]).0, 1);
    assert_eq!(run(&["--format", "xml", "solve"]).0, 1);
    let f = complete_file(6, 3);
    assert_eq!(run(&["surgery", "--input", f.to_str().unwrap(), "--remove", "9"]).0, 1);
    assert_eq!(run(&["path", "--input", f.to_str().unwrap(), "--from", "0,a", "--to", "2,3"]).0, 1);
}

#[test]
fn missing_file_exits_2() {
    assert_eq!(run(&["solve", "--input", "/nonexistent/graph.txt"]).0, 2);
}

#[test]
fn gen_writes_file_and_manifest() {
    let out = tmp("gen.txt");
    let (code, _, _) = run(&["gen", "--n", "10", "--kind", "dirac", "--delta", "0.55", "--p", "0.9", "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (g, _) = Hypergraph::read_edge_file(&out).unwrap();
    assert_eq!((g.n(), g.k()), (10, 3));
    assert!(g.codegree_ratio() >= 0.55);
    let mut m = out.as_os_str().to_owned();
    m.push(".manifest.json");
    let man: RunManifest = serde_json::from_str(&std::fs::read_to_string(PathBuf::from(m)).unwrap()).unwrap();
    assert_eq!(man.seeds, vec![4]);
    assert_eq!(man.config_hash.len(), 64);
    assert!(man.finished_unix >= man.started_unix);
}

#[test]
fn solve_writes_matching() {
    let f = complete_file(7, 3);
    let out = tmp("k7.matching");
    let (code, text, _) = run(&["solve", "--input", f.to_str().unwrap(), "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["residual"].as_f64().unwrap() < 1e-10);
    let g = Hypergraph::complete(7, 3);
    let x = FractionalMatching::read_file(&g, &out).unwrap();
    assert!(x.weights.iter().all(|&w| (w - 1.0 / 15.0).abs() < 1e-12));
}

#[test]
fn bound_and_sweep_reports_parse() {
    let f = complete_file(6, 3);
    let (code, csv, _) = run(&["bound", "--input", f.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 0);
    let rows = parse_csv_report(&csv).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].exact_log2.unwrap() - 60f64.log2()).abs() < 1e-12);

    let (code, json, _) = run(&["sweep", "--complete-k", "3", "--n-from", "5", "--n-to", "9", "--format", "json"]);
    assert_eq!(code, 0);
    let rep = parse_json_report(&json).unwrap();
    assert_eq!(rep.rows.len(), 5);
    assert!(rep.rows.iter().all(|r| r.gap.unwrap() > 0.0));
    assert!(rep.config_hash.is_some());

    let (code, csv, _) = run(&["sweep", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn path_chain_walk_surgery() {
    let f = complete_file(7, 3);
    let f = f.to_str().unwrap();
    let (code, out, _) = run(&["path", "--input", f, "--from", "0,1", "--to", "2,3"]);
    assert_eq!(code, 0);
    let p: Vec<u32> = out.split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(p.len(), 7);
    assert_eq!(&p[..2], &[0, 1]);
    assert_eq!(&p[5..], &[2, 3]);

    let (code, out, _) = run(&["chain", "--input", f, "--t-max", "30", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 32);

    let (code, out, _) = run(&["walk", "--input", f, "--walks", "50", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["walks"], 50);

    let (code, out, _) = run(&["surgery", "--input", f, "--remove", "6", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(v["shift_count"], 0);
}

#[test]
fn pipeline_runs_and_replays() {
    let f = tmp("d60.txt");
    let (code, _, _) = run(&["gen", "--n", "60", "--delta", "0.51", "--p", "0.75", "--seed", "1", "--out", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let args = ["pipeline", "--input", f.to_str().unwrap(), "--runs", "2", "--absorb-delta-hat", "0", "--absorb-tries", "1000", "--format", "json"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 2);

    let (code, _, _) = run(&["pipeline", "--input", f.to_str().unwrap(), "--beta", "1.5"]);
    assert_eq!(code, 1);
}

#[test]
fn binary_reads_env() {
    let bin = env!("CARGO_BIN_EXE_entham");
    let f = complete_file(6, 3);
    let out = Command::new(bin).args(["count", "--input", f.to_str().unwrap()]).env("EH_THREADS", "1").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "60");
    let bad = Command::new(bin).args(["count"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let run_gen = |seed: &str| {
        Command::new(bin).args(["gen", "--n", "9", "--kind", "binomial"]).env("EH_SEED", seed).output().unwrap().stdout
    };
    assert_eq!(run_gen("3"), run_gen("3"));
    assert_ne!(run_gen("3"), run_gen("4"));
}
