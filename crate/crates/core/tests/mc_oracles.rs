//! Model-checking verdicts against an independent oracle: bounded
//! unrollings of the concrete (non-linear) system handed to a complete NRA
//! solver.

use std::path::{Path, PathBuf};
use std::time::Duration;

use nra_cegar::config::{Config, ConstrainMode};
use nra_cegar::mc::{get_cex_formula, vmt_nra_check, McVerdict};
use nra_cegar::smtlib::{parse_vmt, TransitionSystem};
use nra_cegar::solver::{Logic, SatResult, Session, SolverCommand};
use nra_cegar::stats::Journal;
use nra_cegar::terms::{Term, Var};

const BMC_DEPTH: u32 = 10;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn load(name: &str) -> (TransitionSystem, Term) {
    let ts = parse_vmt(&std::fs::read_to_string(corpus(name)).unwrap()).unwrap();
    let p = ts.property(0).unwrap().clone();
    (ts, p)
}

fn nra_sat(f: &Term) -> SatResult {
    let mut s = Session::start(&SolverCommand::from_env(), Logic::Nra).unwrap();
    s.assert(f).unwrap();
    s.check_sat(Some(Duration::from_secs(30))).unwrap()
}

/// Shortest violating path length up to `BMC_DEPTH` states, if any.
fn concrete_bmc(ts: &TransitionSystem, p: &Term) -> Option<u32> {
    (1..=BMC_DEPTH).find(
        |&k| match nra_sat(&get_cex_formula(ts, p, k, ConstrainMode::None, None)) {
            SatResult::Sat => true,
            SatResult::Unsat => false,
            SatResult::Unknown(why) => panic!("oracle gave up at depth {k}: {why}"),
        },
    )
}

fn check(ts: &TransitionSystem, p: &Term) -> McVerdict {
    let cfg = Config {
        timeout: Some(Duration::from_secs(120)),
        ..Config::default()
    };
    vmt_nra_check(ts, p, &cfg, &mut Journal::default()).unwrap()
}

#[test]
fn safe_verdicts_have_no_short_counterexample() {
    for name in [
        "counter.vmt",
        "intro.vmt",
        "sum_squares.vmt",
        "mode_switch.vmt",
        "tcm_odometer.vmt",
    ] {
        let (ts, p) = load(name);
        assert_eq!(concrete_bmc(&ts, &p), None, "{name}");
        assert!(matches!(check(&ts, &p), McVerdict::Safe), "{name}");
    }
}

#[test]
fn unsafe_traces_are_concrete_paths_of_minimal_length() {
    for name in [
        "intro_z_le_100.vmt",
        "init_violation.vmt",
        "squaring.vmt",
        "sum_squares_unsafe.vmt",
        "tcm_odometer_unsafe.vmt",
    ] {
        let (ts, p) = load(name);
        let McVerdict::Unsafe(trace) = check(&ts, &p) else {
            panic!("{name}: expected UNSAFE");
        };
        let shortest = concrete_bmc(&ts, &p).expect("oracle finds a violation");
        assert!(trace.len() as u32 >= shortest, "{name}");
        // pin every state of the trace and let the NRA solver re-derive it
        let len = trace.len() as u32;
        let mut parts = vec![get_cex_formula(&ts, &p, len, ConstrainMode::None, None)];
        for (i, state) in trace.states.iter().enumerate() {
            for v in ts.state_vars() {
                let val = state
                    .get(&v)
                    .unwrap_or_else(|| panic!("{name}: {} missing at step {i}", v.name));
                parts.push(Term::eq(Term::var(Var::at(&v, i as u32)), val.to_term()));
            }
        }
        assert_eq!(
            nra_sat(&Term::and(parts)),
            SatResult::Sat,
            "{name}: trace is not a path"
        );
    }
}

#[test]
fn irrational_counterexample_exists_but_is_not_reported() {
    let (ts, p) = load("irrational_cex.vmt");
    assert_eq!(concrete_bmc(&ts, &p), Some(1));
    assert!(matches!(check(&ts, &p), McVerdict::Unknown { .. }));
}
