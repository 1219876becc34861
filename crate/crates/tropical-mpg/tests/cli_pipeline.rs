//! End-to-end checks of the installed binary: stdin composition and exit
//! codes, exercised through real processes.

use std::io::Write;
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_tropmpg");

#[test]
fn gen_pipes_into_solve() {
    let gen = Command::new(BIN)
        .args([
            "gen", "--n", "2", "--m", "2", "--q", "2", "--M", "2", "--W", "5", "--seed", "7",
        ])
        .output()
        .unwrap();
    assert!(gen.status.success());

    let mut solve = Command::new(BIN)
        .args(["solve", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    solve
        .stdin
        .as_mut()
        .unwrap()
        .write_all(&gen.stdout)
        .unwrap();
    let out = solve.wait_with_output().unwrap();
    let code = out.status.code().unwrap();
    assert!(
        [0, 1, 2].contains(&code),
        "solve must exit with a verdict code, got {code}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"winner\""));
}

#[test]
fn oracle_budget_exceeded_exits_69() {
    let gen = Command::new(BIN)
        .args([
            "gen",
            "--n",
            "8",
            "--m",
            "8",
            "--q",
            "8",
            "--M",
            "2",
            "--W",
            "3",
            "--seed",
            "1",
            "--density",
            "1.0",
        ])
        .output()
        .unwrap();
    assert!(gen.status.success());

    let mut oracle = Command::new(BIN)
        .args(["oracle", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    oracle
        .stdin
        .as_mut()
        .unwrap()
        .write_all(&gen.stdout)
        .unwrap();
    let out = oracle.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(69));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn missing_file_exits_65() {
    let out = Command::new(BIN)
        .args(["solve", "/nonexistent/game.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(65));
}

#[test]
fn usage_error_exits_64() {
    let out = Command::new(BIN).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
}
