//! End-to-end driver tests: exit codes, byte-for-byte determinism, the CSV
//! column contract, and the composition node-cap environment variable.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pldyn"))
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("pldyn-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

const PROGRAM: &str = "\
# a valley map cycled with its mirror
map up = pl [(0,0),(1/3,1),(1,1/3)]
map down = pl [(0,1/3),(1/3,0),(1,1)]
seq s = cycle up down
set u = (0,1/8)
set v = (5/8,3/4)
query hitset s u v horizon=60
query compose down up
query invariant up [1/3,1]
";

#[test]
fn check_accepts_clean_programs() {
    let path = write_temp("clean.dsl", PROGRAM);
    let out = bin().arg("check").arg(&path).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok: 2 maps"));
}

#[test]
fn check_exits_one_with_positioned_diagnostics() {
    let path = write_temp("bad.dsl", "map m = pl [(0,0),(1,3/2)]\n");
    let out = bin().arg("check").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1:22"), "missing position: {err}");
    assert!(err.contains("outside [0,1]"));
}

#[test]
fn run_output_is_deterministic_bytes() {
    let path = write_temp("det.dsl", PROGRAM);
    let run = || -> Output { bin().arg("run").arg(&path).output().unwrap() };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "two runs differ byte-for-byte");
}

#[test]
fn csv_follows_the_hit_column_contract() {
    let path = write_temp("csv.dsl", PROGRAM);
    let out = bin().arg("run").arg(&path).args(["--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,hit,prefix_density"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("1,"), "row per index from n=1: {first}");
    let rows = text
        .lines()
        .take_while(|l| !l.is_empty())
        .skip(1)
        .count();
    assert_eq!(rows, 60, "one row per index up to the horizon");
}

#[test]
fn compose_subcommand_prints_the_exact_composition() {
    let path = write_temp("compose.dsl", PROGRAM);
    let out = bin()
        .arg("compose")
        .arg(&path)
        .args(["down", "up"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("pl [(0,1/3), (1/9,0), (1/3,1), (1,0)]"),
        "unexpected composition: {text}"
    );
}

#[test]
fn node_cap_env_var_guards_compositions() {
    let path = write_temp("cap.dsl", PROGRAM);
    let out = bin()
        .arg("compose")
        .arg(&path)
        .args(["down", "up"])
        .env("PLDYN_COMPOSE_NODE_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exceeds cap 2"), "unexpected stderr: {err}");
}

#[test]
fn hitset_subcommand_with_family_verdict() {
    let path = write_temp("hs.dsl", PROGRAM);
    let out = bin()
        .arg("hitset")
        .arg(&path)
        .args(["s", "u", "v", "--horizon", "40", "--family", "infinite"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"query\": \"hitset\""));
    assert!(text.contains("\"family\": \"infinite\""));
}

#[test]
fn classify_subcommand_reports_verdicts() {
    let path = write_temp("cls.dsl", PROGRAM);
    let out = bin()
        .arg("classify")
        .arg(&path)
        .args(["transitive", "s", "--depth", "2", "--horizon", "300"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"verdict\""));
}

#[test]
fn verify_paper_exits_zero_and_lists_fixtures() {
    let out = bin().arg("verify-paper").args(["--format", "csv"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("fixture,status,detail"));
    assert!(text.contains("ex3.4-compose,pass"));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0 failed"));
}

#[test]
fn run_propagates_verify_paper_queries() {
    let path = write_temp("vp.dsl", "query verify_paper\n");
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"query\": \"verify_paper\""));
    assert!(text.contains("\"failed\": 0"));
}
