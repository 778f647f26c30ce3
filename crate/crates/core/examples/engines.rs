//! The same CEGAR loop with different abstract model checkers. Plain
//! k-induction cannot prove the running example; Houdini finds the
//! auxiliary invariant x >= 2, y >= 2 that makes it 1-inductive.

use std::time::Instant;

use nra_cegar::config::{Config, Engine};
use nra_cegar::mc::{vmt_nra_check, McVerdict};
use nra_cegar::smtlib::parse_vmt;
use nra_cegar::stats::Journal;

fn main() {
    let ts = parse_vmt(include_str!("../corpus/intro.vmt")).unwrap();
    let prop = ts.property(0).unwrap().clone();
    for engine in [Engine::KindHoudini, Engine::Kind, Engine::Bmc] {
        let cfg = Config {
            engine,
            max_k: 20,
            ..Config::default()
        };
        if !cfg.solver.is_available() {
            eprintln!("solver `{}` not found; set NRA_CEGAR_SOLVER", cfg.solver);
            return;
        }
        let started = Instant::now();
        let mut journal = Journal::default();
        let verdict = match vmt_nra_check(&ts, &prop, &cfg, &mut journal) {
            Ok(McVerdict::Safe) => "SAFE".to_string(),
            Ok(McVerdict::Unsafe(_)) => "UNSAFE".to_string(),
            Ok(McVerdict::Unknown { reason, .. }) => format!("UNKNOWN ({reason})"),
            Err(e) => format!("error: {e}"),
        };
        println!(
            "{:<13} {:<24} {:>3} CEGAR iterations {:>5} lemmas {:>7.2}s",
            engine.to_string(),
            verdict,
            journal.stats.cegar_iterations,
            journal.stats.lemmas.total(),
            started.elapsed().as_secs_f64()
        );
    }
}
