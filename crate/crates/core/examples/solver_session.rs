//! Talk to the SMT solver incrementally: scopes, models with fmul values,
//! and unsat cores over caller-chosen labels.

use nra_cegar::smtlib::parse_smt2_formula;
use nra_cegar::solver::{Logic, Session, SolverCommand, Verdict};

fn f(s: &str) -> nra_cegar::terms::Term {
    parse_smt2_formula(s).unwrap()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cmd = SolverCommand::from_env();
    if !cmd.is_available() {
        eprintln!("solver `{cmd}` not found; set NRA_CEGAR_SOLVER");
        return Ok(());
    }
    let mut s = Session::start(&cmd, Logic::UfLra)?;
    s.assert(&f("(and (>= x 2) (>= y 2))"))?;

    let fx = f("(= (fmul x y) 1)");
    match s.check(&[("low".into(), fx)], None)? {
        Verdict::Sat(m) => print!("fmul(x,y) = 1 is fine for EUF:\n{m}"),
        other => println!("{other:?}"),
    }

    let lemma = f("(=> (and (> x 2) (> y 2)) (> (fmul x y) (- (+ (* 2 x) (* 2 y)) 4)))");
    let line_x = f("(=> (= x 2) (= (fmul x y) (* 2 y)))");
    let line_y = f("(=> (= y 2) (= (fmul x y) (* 2 x)))");
    let query = vec![
        ("low".to_string(), f("(<= (fmul x y) 3)")),
        ("tangent".to_string(), lemma),
        ("line-x".to_string(), line_x),
        ("line-y".to_string(), line_y),
        ("noise".to_string(), f("(>= (+ x y) 0)")),
    ];
    if let Verdict::Unsat(core) = s.check(&query, None)? {
        println!("\nwith tangent lemmas at (2,2): unsat, core {core:?}");
    }
    println!("\n{} checks, {} restarts", s.stats().checks, s.stats().restarts);
    Ok(())
}
