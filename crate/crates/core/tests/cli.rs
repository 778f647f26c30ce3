//! The binary end to end: verdict lines, traces, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nra-cegar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn running_example_is_safe() {
    let o = run(&["check-vmt", corpus("intro.vmt").to_str().unwrap(), "--timeout", "60"]);
    assert_eq!(stdout(&o).lines().next(), Some("SAFE"));
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn unsafe_variant_prints_a_ten_state_trace() {
    let o = run(&["check-vmt", corpus("intro_z_le_100.vmt").to_str().unwrap(), "--stats"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "UNSAFE");
    assert_eq!(lines.iter().filter(|l| l.starts_with("step ")).count(), 10);
    let tail = &lines[lines.iter().position(|l| *l == "step 9:").unwrap()..];
    for want in ["  x = 11", "  y = 11", "  z = 121"] {
        assert!(tail.contains(&want), "missing {want} in {tail:?}");
    }
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cegar-iterations:"));
}

#[test]
fn irrational_root_is_unknown() {
    let o = run(&["check-smt", corpus("sqrt2.smt2").to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "unknown");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sat_script_prints_an_exact_model() {
    let o = run(&["check-smt", "--model", corpus("factor.smt2").to_str().unwrap()]);
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("sat"));
    assert!(out.lines().skip(1).all(|l| l.contains(" = ")));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&["check-vmt", "--no-such-flag", "x.vmt"]).status.code(), Some(3));
    assert_eq!(run(&["check-vmt", "/nonexistent/file.vmt"]).status.code(), Some(3));
    assert_eq!(run(&["bench", ".", "--jobs", "0"]).status.code(), Some(3));
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("check-vmt"));
}

#[test]
fn bench_flags_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(corpus("counter.vmt"), dir.path().join("counter.vmt")).unwrap();
    std::fs::write(dir.path().join("counter.expected"), "UNSAFE\n").unwrap();
    std::fs::copy(corpus("negative_square.smt2"), dir.path().join("negative_square.smt2")).unwrap();
    std::fs::write(dir.path().join("negative_square.expected"), "unsat\n").unwrap();
    let o = run(&["bench", dir.path().to_str().unwrap(), "--jobs", "2"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], nra_cegar::cli::CSV_HEADER);
    assert!(lines[1].starts_with("counter.vmt,SAFE,UNSAFE,MISMATCH,"), "{out}");
    assert!(lines[2].starts_with("negative_square.smt2,unsat,unsat,ok,"), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatches 1"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_on_empty_dir_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(stdout(&o), format!("{}\n", nra_cegar::cli::CSV_HEADER));
    assert_eq!(o.status.code(), Some(0));
}
