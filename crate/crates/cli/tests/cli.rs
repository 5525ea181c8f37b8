//! End-to-end checks of the `recolor` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn recolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recolor"))
        .args(args)
        .env_remove("RECOLOR_SEED")
        .output()
        .expect("spawning recolor")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &Path, family: &str, n: &str, d: &str, seed: &str) -> std::path::PathBuf {
    let file = dir.join(format!("{family}-{seed}.json"));
    let out = recolor(&["gen", "--family", family, "--n", n, "--D", d, "--seed", seed, "--out", path(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn gen_run_audit_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "path_doubling", "256", "16", "3");
    let trace = dir.path().join("trace.jsonl");
    let dump = dir.path().join("moderation.json");
    for algo in ["A", "B", "Bhat", "C", "greedy"] {
        let out = recolor(&[
            "run", "--instance", path(&inst), "--algo", algo, "--trace", path(&trace),
            "--dump-moderation", path(&dump), "--audit",
        ]);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["result"]["violations"], 0, "{algo}");
        assert_eq!(v["result"]["n"], 256);
        let audit = recolor(&["audit", "--trace", path(&trace)]);
        assert!(audit.status.success(), "{algo}: {}", String::from_utf8_lossy(&audit.stdout));
        assert_eq!(json(&audit)["passed"], true);
    }
    let dumps: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    assert!(dumps.is_array());
}

#[test]
fn gen_is_deterministic_and_reads_seed_from_env() {
    let a = recolor(&["gen", "--family", "forest", "--n", "64", "--D", "8", "--seed", "11"]);
    let b = Command::new(env!("CARGO_BIN_EXE_recolor"))
        .args(["gen", "--family", "forest", "--n", "64", "--D", "8"])
        .env("RECOLOR_SEED", "11")
        .output()
        .unwrap();
    let c = recolor(&["gen", "--family", "forest", "--n", "64", "--D", "8", "--seed", "12"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn oracle_reports_optimum_and_bond() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "cycles", "40", "8", "1");
    let out = recolor(&["oracle", "--instance", path(&inst)]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["opt2"].as_u64().is_some());
    assert_eq!(v["bond"]["beta"], 2);
}

#[test]
fn sweep_writes_csv_and_plotdata_reads_it() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = recolor(&[
        "sweep", "--family", "path_doubling", "--algos", "A,B", "--n", "128", "--D", "4,16", "--seeds", "3",
        "--out", path(&csv),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("run_id,algorithm,n,m,D,"));
    // 2 algorithms x 2 values of D x 3 seeds, plus one mean row per cell
    assert_eq!(lines.count(), 12 + 4);

    let points = dir.path().join("points.csv");
    let out = recolor(&["plotdata", "--csv", path(&csv), "--out", path(&points)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&points).unwrap().lines().count() > 1);
}

#[test]
fn adaptive_instance_runs_and_audits_from_trace() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "dominating", "64", "8", "2");
    let trace = dir.path().join("dom.jsonl");
    let out = recolor(&["run", "--instance", path(&inst), "--algo", "B", "--trace", path(&trace)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["seed"], 2);
    let audit = recolor(&["audit", "--trace", path(&trace), "--checks", "costs"]);
    assert!(audit.status.success());
    let oracle = recolor(&["oracle", "--instance", path(&inst)]);
    assert_eq!(oracle.status.code(), Some(2));
}

#[test]
fn bad_input_exits_with_code_two() {
    let out = recolor(&["run", "--instance", "/nonexistent/instance.json", "--algo", "B"]);
    assert_eq!(out.status.code(), Some(2));
    let out = recolor(&["gen", "--family", "forest", "--n", "8", "--D", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
