//! Decide small QF_NRA problems with the incremental-linearization loop.

use nra_cegar::config::Config;
use nra_cegar::nra::{smt_nra_check, SmtVerdict};
use nra_cegar::smtlib::parse_smt2_formula;
use nra_cegar::stats::Journal;

const PROBLEMS: &[&str] = &[
    "(and (= (* x y) 6) (= (+ x y) 5) (< x y))",
    "(and (>= x 2) (>= y 2) (<= (* x y) 3))",
    "(< (* x x) 0)",
    "(and (> x 0) (= (* x x) 2))",
    "(and (> (* x y) 10) (< x 1) (< y 1) (> x (- 1)))",
];

fn main() {
    let cfg = Config::default();
    if !cfg.solver.is_available() {
        eprintln!("solver `{}` not found; set NRA_CEGAR_SOLVER", cfg.solver);
        return;
    }
    for text in PROBLEMS {
        let phi = parse_smt2_formula(text).unwrap();
        let mut journal = Journal::default();
        let verdict = smt_nra_check(&phi, &cfg, cfg.budget(), &mut journal);
        let s = &journal.stats;
        match verdict {
            SmtVerdict::Sat(m) => {
                let vals: Vec<String> = m.vars().map(|(v, x)| format!("{v}={x}")).collect();
                println!("sat     {text}   [{}]", vals.join(" "));
            }
            SmtVerdict::Unsat(lemmas) => println!("unsat   {text}   [{} lemmas needed]", lemmas.len()),
            SmtVerdict::Unknown(why) => println!("unknown {text}   [{why}]"),
        }
        println!(
            "        {} refinement iterations, {} lemmas",
            s.refinement_iterations,
            s.lemmas.total()
        );
    }
}
