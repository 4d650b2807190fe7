use std::path::Path;
use std::process::{Command, Output};

use bjortho::suite::{RunReport, Status, Summary};
use serde_json::Value;

fn bjortho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bjortho")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn vec_orth() {
    let o = bjortho(&["vec-orth", "--norm", "lp:2:2", "--x", "1,0", "--y", "0,1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["decision"], "ORTHOGONAL");
    let o = bjortho(&["vec-orth", "--norm", "lp:1:2", "--x", "1,0", "--y", "1,1"]);
    assert_eq!(json(&o)["decision"], "ORTHOGONAL");
    let o = bjortho(&["vec-orth", "--norm", "lp:2:2", "--x", "1,0", "--y", "1,0"]);
    assert_eq!((code(&o), json(&o)["decision"].clone()), (0, "NOT_ORTHOGONAL".into()));
    let o = bjortho(&["vec-orth", "--norm", "lp:3:2", "--x", "-1,0.5", "--y", "-0.25,1"]);
    assert_eq!(code(&o), 0);

    for bad in [
        vec!["vec-orth", "--norm", "lp:2:2", "--x", "1,0,0", "--y", "0,1"],
        vec!["vec-orth", "--norm", "lp:0:2", "--x", "1,0", "--y", "0,1"],
        vec!["vec-orth", "--norm", "lp:2:2", "--x", "1,x", "--y", "0,1"],
        vec!["vec-orth", "--norm", "lp:2:2", "--x", "1,0"],
        vec!["no-such-command"],
    ] {
        let o = bjortho(&bad);
        assert_eq!(code(&o), 1, "{bad:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn op_orth() {
    let t = "1,0,0;0,0.5,0;0,0,0.5";
    let a = "0,0,0;0,1,0;0,0,0";
    let o = bjortho(&["op-orth", "--norm", "lp:2:3", "--t", t, "--a", a]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["direct"]["decision"], "ORTHOGONAL");
    assert_eq!(v["via_attainment"]["decision"], "ORTHOGONAL");
    assert_eq!(v["agree"], true);
    let o = bjortho(&["op-orth", "--norm", "lp:2:3", "--t", a, "--a", t, "--route", "direct"]);
    assert_eq!(json(&o)["decision"], "NOT_ORTHOGONAL");
    let o = bjortho(&["op-orth", "--norm", "lp:2:3", "--t", a, "--a", t, "--route", "mt"]);
    assert_eq!(json(&o)["decision"], "NOT_ORTHOGONAL");
    let o = bjortho(&["op-orth", "--norm", "lp:3:2", "--t", "1,2;-1,0.5", "--a", "1,2;-1,0.5"]);
    assert_eq!(json(&o)["direct"]["decision"], "NOT_ORTHOGONAL");

    // A continuum of maximizers leaves only the direct route.
    let o = bjortho(&["op-orth", "--norm", "lp:2:2", "--t", "1,0;0,1", "--a", "1,0;0,-1", "--route", "mt"]);
    assert_eq!(code(&o), 10);
    let o = bjortho(&["op-orth", "--norm", "lp:2:2", "--t", "1,0;0,1", "--a", "1,0;0,-1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["via_attainment_error"], "MT_UNRESOLVED");

    let o = bjortho(&["op-orth", "--norm", "lp:2:2", "--t", t, "--a", a]);
    assert_eq!(code(&o), 1);
    let o = bjortho(&["op-orth", "--norm", "lp:2:2", "--t", "1,0;0,1", "--a", "1,0;0,1", "--route", "sideways"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn witness() {
    let t = "1,0,0;0,0.5,0;0,0,0.25";
    let o = bjortho(&["witness", "--check", "left", "--norm", "lp:3:3", "--t", t, "--seed", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["direction"], "REFUTES_LEFT_SYMMETRY");
    assert_eq!(v["forward"]["decision"], "ORTHOGONAL");
    assert_eq!(v["backward"]["decision"], "NOT_ORTHOGONAL");
    // Numeric names select the same checks.
    let numeric = bjortho(&["witness", "--theorem", "2.3", "--norm", "lp:3:3", "--t", t, "--seed", "1"]);
    assert_eq!(numeric.stdout, o.stdout);

    let o = bjortho(&["witness", "--check", "left", "--t", "0,0;0,0"]);
    assert_eq!(code(&o), 4);
    assert_eq!(json(&o)["error"], "ZERO_OPERATOR");
    let o = bjortho(&["witness", "--check", "left", "--norm", "lp:1:2", "--t", "1,0;0,1"]);
    assert_eq!(code(&o), 5);
    let o = bjortho(&["witness", "--check", "right", "--norm", "lp:2:2", "--t", "1,0;0,1"]);
    assert_eq!((code(&o), json(&o)["error"].clone()), (7, "NOT_ANTIPODAL_MT".into()));
    let o = bjortho(&["witness", "--check", "right", "--norm", "lp:3:2", "--t", "1,0;0,0"]);
    assert_eq!(code(&o), 8);
    let o = bjortho(&["witness", "--theorem", "2.1", "--norm", "lp:3:3", "--t", t]);
    assert_eq!(code(&o), 9);
    let o = bjortho(&["witness", "--check", "left-planar", "--norm", "lp:3:2", "--t", "1,0;0,0.5"]);
    assert_eq!(code(&o), 0);

    let o = bjortho(&["witness", "--check", "kernel", "--norm", "lp:3:3", "--t", "0,0,0;0,1,0;0,0,0.5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["case"], "WITNESS");
    assert_eq!(v["i_perp_t"]["decision"], "ORTHOGONAL");
    let o = bjortho(&["witness", "--check", "kernel", "--norm", "lp:3:3", "--t", "3,0,0;0,2,0;0,0,1"]);
    assert_eq!(code(&o), 9);

    let o = bjortho(&["witness", "--check", "eigen", "--norm", "lp:3:3", "--t", "2,0,0;0,1,0;0,0,0"]);
    assert_eq!((code(&o), json(&o)["case"].clone()), (0, "RANK_GE_N_MINUS_1".into()));
    let o = bjortho(&["witness", "--theorem", "2.5", "--norm", "lp:3:3", "--t", "2,0,0;0,0,0;0,0,0"]);
    assert_eq!((code(&o), json(&o)["case"].clone()), (0, "WITNESS".into()));

    let o = bjortho(&["witness", "--check", "sideways", "--t", "1,0;0,1"]);
    assert_eq!(code(&o), 1);
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
specs = ["lp:3:2", "lp:2:3"]
route_specs = ["lp:1.5:2", "lp:3:3"]
seeds = [1, 2, 3, 4, 5]
suites = ["diagonal_pair", "left_symmetry", "right_symmetry", "transfer", "route_equivalence", "hilbert", "construction_audit"]

[counts]
left = 2
right = 1
transfer_operators = 1
transfer_trials = 10
route_pairs = 3
hilbert_matrices = 5
hilbert_pairs = 200
"#;

fn run_suite_cli(config: &str, out: &Path, threads: &str) -> (i32, Vec<u8>) {
    let o = Command::new(env!("CARGO_BIN_EXE_bjortho"))
        .args(["suite", "--config", config, "--out", out.to_str().unwrap()])
        .env("BJORTHO_THREADS", threads)
        .output()
        .unwrap();
    (code(&o), std::fs::read(out).unwrap())
}

#[test]
fn suite_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let (c1, a) = run_suite_cli(&cfg, &dir.path().join("a.json"), "1");
    let (c2, b) = run_suite_cli(&cfg, &dir.path().join("b.json"), "1");
    let (c3, c) = run_suite_cli(&cfg, &dir.path().join("c.json"), "4");
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(a, b);
    assert_eq!(a, c);

    let report: RunReport = serde_json::from_slice(&a).unwrap();
    assert_eq!(report.summary, Summary::tally(&report.records));
    assert_eq!(report.summary.fail, 0);
    assert!(report.records.iter().all(|r| r.wall_ms.is_none()));
    assert_eq!(serde_json::to_vec_pretty(&report).unwrap(), a.strip_suffix(b"\n").unwrap());
}

#[test]
fn suite_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "flat.toml",
        "specs = [\"lp:1:2\"]\nsuites = [\"left_symmetry\"]\n[counts]\nleft = 3\n",
    );
    let o = bjortho(&["suite", "--config", &cfg]);
    assert_eq!(code(&o), 0);
    let report: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.summary.hypothesis_failed, 3);
    assert!(report.records.iter().all(|r| r.status == Status::HypothesisFailed));

    // No certificate can fail by more than 10, so every left check fails.
    let cfg = write_config(
        dir.path(),
        "strict.toml",
        "specs = [\"lp:3:2\"]\nsuites = [\"left_symmetry\"]\n[counts]\nleft = 1\n[tolerances]\ncertificate = 10.0\n",
    );
    let o = bjortho(&["suite", "--config", &cfg, "--timings"]);
    assert_eq!(code(&o), 2);
    let report: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report.summary.fail, 1);
    assert!(report.records[0].wall_ms.is_some());

    for (name, body) in [("bad1.toml", "specs = [\"lp:x:2\"]"), ("bad2.toml", "[counts]\nleft = 0"), ("bad3.toml", "specs = 3")] {
        let cfg = write_config(dir.path(), name, body);
        assert_eq!(code(&bjortho(&["suite", "--config", &cfg])), 1, "{name}");
    }
    assert_eq!(code(&bjortho(&["suite", "--config", "/nonexistent/config.toml"])), 1);
}
