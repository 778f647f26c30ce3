//! Satisfiability of quantifier-free NRA formulas by incremental
//! linearization: solve the LRA+EUF abstraction, try to lift its model to a
//! real one, otherwise block it with lemmas and repeat.

use std::collections::BTreeSet;

use crate::abstraction::{abstract_formula, concretize};
use crate::axiom::Axiom;
use crate::config::{Budget, Config, ModelFinder};
use crate::refinement::{refine, Frontiers, RefineError};
use crate::solver::{Logic, SatResult, Session, SolverCommand, SolverError, Verdict};
use crate::stats::Journal;
use crate::terms::{atoms_of, evaluate, evaluate_with, fmuls_of, FmulMode, Model, Term, Value};

#[derive(Clone, Debug)]
pub enum SmtVerdict {
    /// Model with exact products, satisfying the input formula.
    Sat(Model),
    /// Lemmas that, with the abstraction, are unsatisfiable.
    Unsat(Vec<Axiom>),
    Unknown(String),
}

/// Outcome of the abstract loop.
#[derive(Clone, Debug)]
pub enum ExtResult {
    Unsat(Vec<Axiom>),
    Sat(Model),
    /// Budget exhausted or backend failure; not a proof of anything.
    Aborted(String),
}

/// An abstract query: `formula` is what the solver sees (abstraction plus
/// static axioms), `skeleton` the formula whose atoms the line search pins.
#[derive(Clone, Debug)]
pub struct AbstractQuery {
    pub formula: Term,
    pub skeleton: Term,
    pub fmuls: BTreeSet<Term>,
}

impl AbstractQuery {
    pub fn new(formula: Term) -> AbstractQuery {
        AbstractQuery {
            fmuls: fmuls_of(&formula),
            skeleton: formula.clone(),
            formula,
        }
    }
}

pub fn smt_nra_check(phi: &Term, cfg: &Config, budget: Budget, journal: &mut Journal) -> SmtVerdict {
    let abs = abstract_formula(phi, &cfg.abstraction);
    for a in &abs.static_axioms {
        journal.lemma(a);
    }
    let query = AbstractQuery {
        formula: abs.constrained(),
        skeleton: abs.abstract_formula.clone(),
        fmuls: abs.fmuls.clone(),
    };
    match smt_nra_check_ext(&query, cfg, budget, journal) {
        ExtResult::Unsat(axioms) => SmtVerdict::Unsat(axioms),
        ExtResult::Aborted(reason) => SmtVerdict::Unknown(reason),
        ExtResult::Sat(model) => match evaluate(phi, &model) {
            Ok(Value::Bool(true)) => SmtVerdict::Sat(model),
            other => SmtVerdict::Unknown(format!(
                "internal error: lifted model does not satisfy the input ({other:?})"
            )),
        },
    }
}

pub fn smt_nra_check_ext(query: &AbstractQuery, cfg: &Config, budget: Budget, journal: &mut Journal) -> ExtResult {
    let mut session = match Session::start(&cfg.solver, Logic::UfLra) {
        Ok(s) => s,
        Err(e) => return ExtResult::Aborted(e.to_string()),
    };
    let result = run_loop(&mut session, query, cfg, budget, journal);
    journal.stats.solver_calls += session.stats().checks;
    match result {
        Ok(r) => r,
        Err(e) => ExtResult::Aborted(e.to_string()),
    }
}

fn run_loop(
    session: &mut Session,
    query: &AbstractQuery,
    cfg: &Config,
    budget: Budget,
    journal: &mut Journal,
) -> Result<ExtResult, SolverError> {
    session.assert(&query.formula)?;
    let mut gamma: Vec<Axiom> = Vec::new();
    let mut seen: BTreeSet<Term> = BTreeSet::new();
    let mut frontiers = Frontiers::new();
    let mut iterations = 0;
    loop {
        if iterations >= budget.max_iterations {
            return Ok(ExtResult::Aborted(format!(
                "refinement budget of {} iterations exhausted",
                budget.max_iterations
            )));
        }
        if budget.expired() {
            return Ok(ExtResult::Aborted("timeout".into()));
        }
        iterations += 1;
        journal.stats.refinement_iterations += 1;
        match session.check_sat(budget.remaining())? {
            SatResult::Unsat => return Ok(ExtResult::Unsat(gamma)),
            SatResult::Unknown(reason) => return Ok(ExtResult::Aborted(reason)),
            SatResult::Sat => {}
        }
        let abstract_model = match session.model() {
            Ok(m) => m,
            Err(SolverError::Irrational(x)) => return Ok(ExtResult::Aborted(format!("irrational value for {x}"))),
            Err(e) => return Err(e),
        };
        if let Some(x) = oversized_value(&abstract_model, cfg.max_value_digits) {
            return Ok(ExtResult::Aborted(format!(
                "model value for {x} exceeds {} digits",
                cfg.max_value_digits
            )));
        }
        if let Some(m) = find_model(session, query, &abstract_model, cfg, budget)? {
            return Ok(ExtResult::Sat(m));
        }
        let mut fmuls = query.fmuls.clone();
        fmuls.extend(abstract_model.fmuls().map(|(t, _)| t.clone()));
        let lemmas = match refine(&abstract_model, &fmuls, &mut frontiers, &cfg.refine) {
            Ok(l) => l,
            Err(RefineError::NotSpurious) => {
                // exact already; only a failed lift can get here
                return Ok(match get_nra_model_eval(&query.formula, &abstract_model) {
                    Some(m) => ExtResult::Sat(m),
                    None => ExtResult::Aborted("exact model does not satisfy the abstraction".into()),
                });
            }
        };
        let fresh: Vec<Axiom> = lemmas.into_iter().filter(|a| seen.insert(a.formula.clone())).collect();
        if fresh.is_empty() {
            return Ok(ExtResult::Aborted("refinement produced no new lemma".into()));
        }
        session.push()?;
        for a in &fresh {
            session.assert(&a.formula)?;
            journal.lemma(a);
        }
        gamma.extend(fresh);
    }
}

/// First variable or application whose value has a numerator or
/// denominator longer than `digits` decimal digits.
fn oversized_value(m: &Model, digits: usize) -> Option<String> {
    let big = |r: &crate::terms::Rat| {
        r.numer().to_string().trim_start_matches('-').len() > digits || r.denom().to_string().len() > digits
    };
    for (v, x) in m.vars() {
        if x.as_real().is_some_and(big) {
            return Some(v.to_string());
        }
    }
    m.fmuls().find(|(_, x)| big(x)).map(|(t, _)| t.to_string())
}

fn find_model(
    session: &mut Session,
    query: &AbstractQuery,
    abstract_model: &Model,
    cfg: &Config,
    budget: Budget,
) -> Result<Option<Model>, SolverError> {
    if let Some(m) = get_nra_model_eval(&query.formula, abstract_model) {
        return Ok(Some(m));
    }
    match cfg.model_finder {
        ModelFinder::Eval => Ok(None),
        ModelFinder::Lines => get_nra_model_lines(session, query, abstract_model, budget),
        ModelFinder::Nra => {
            if let Some(cmd) = &cfg.nra_solver {
                if let Some(m) = get_nra_model_complete(query, abstract_model, cmd, budget) {
                    return Ok(Some(m));
                }
            }
            get_nra_model_lines(session, query, abstract_model, budget)
        }
    }
}

/// Checks `m` against `formula` with every application read as the
/// product of its arguments.
fn lifts(formula: &Term, m: &Model) -> bool {
    m.fmuls_exact() && matches!(evaluate_with(formula, m, FmulMode::Product), Ok(Value::Bool(true)))
}

/// The abstract model itself, when all its fmul values are exact products.
pub fn get_nra_model_eval(formula: &Term, abstract_model: &Model) -> Option<Model> {
    lifts(formula, abstract_model).then(|| abstract_model.clone())
}

/// Conjunction of the atoms of `skeleton`, each with the polarity it has
/// under `m`.
pub fn literal_assignment(skeleton: &Term, m: &Model) -> Option<Term> {
    let mut lits = Vec::new();
    for atom in atoms_of(skeleton) {
        match evaluate(&atom, m).ok()? {
            Value::Bool(true) => lits.push(atom),
            Value::Bool(false) => lits.push(Term::not(atom)),
            Value::Real(_) => return None,
        }
    }
    Some(Term::and(lits))
}

/// For each application, one factor is fixed to its model value and the
/// application equals the resulting linear term.
pub fn multiplication_lines(fmuls: &BTreeSet<Term>, m: &Model) -> Option<Term> {
    let mut parts = Vec::new();
    for f in fmuls {
        let (s, t) = f.fmul_args()?;
        match (s.as_const(), t.as_const()) {
            (Some(c), _) => parts.push(Term::eq(f.clone(), Term::scale(c.clone(), t.clone()))),
            (_, Some(c)) => parts.push(Term::eq(f.clone(), Term::scale(c.clone(), s.clone()))),
            _ => {
                let (a, b) = (m.eval_real(s).ok()?, m.eval_real(t).ok()?);
                parts.push(Term::or2(
                    Term::and2(
                        Term::eq(s.clone(), Term::real(a.clone())),
                        Term::eq(f.clone(), Term::scale(a, t.clone())),
                    ),
                    Term::and2(
                        Term::eq(t.clone(), Term::real(b.clone())),
                        Term::eq(f.clone(), Term::scale(b, s.clone())),
                    ),
                ));
            }
        }
    }
    Some(Term::and(parts))
}

/// Line search in a scratch scope of `session`; the session keeps the
/// abstraction and all lemmas, which real models satisfy anyway.
pub fn get_nra_model_lines(
    session: &mut Session,
    query: &AbstractQuery,
    abstract_model: &Model,
    budget: Budget,
) -> Result<Option<Model>, SolverError> {
    let Some(psi) = literal_assignment(&query.skeleton, abstract_model) else {
        return Ok(None);
    };
    let mut fmuls = fmuls_of(&psi);
    fmuls.extend(fmuls_of(&query.formula));
    let Some(lines) = multiplication_lines(&fmuls, abstract_model) else {
        return Ok(None);
    };
    session.push()?;
    session.assert(&Term::and2(psi, lines))?;
    let outcome = match session.check_sat(budget.remaining()) {
        Ok(SatResult::Sat) => match session.model() {
            Ok(m) => Ok(Some(m)),
            Err(SolverError::Irrational(_)) | Err(SolverError::Protocol(_)) => Ok(None),
            Err(e) => Err(e),
        },
        Ok(_) => Ok(None),
        Err(e) => Err(e),
    };
    session.pop()?;
    Ok(outcome?.filter(|m| lifts(&query.formula, m)))
}

/// Ships the concretized literal assignment to a complete NRA solver.
pub fn get_nra_model_complete(
    query: &AbstractQuery,
    abstract_model: &Model,
    cmd: &SolverCommand,
    budget: Budget,
) -> Option<Model> {
    let psi = literal_assignment(&query.skeleton, abstract_model)?;
    let mut session = match Session::start(cmd, Logic::Nra) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("external NRA solver unavailable: {e}");
            return None;
        }
    };
    let verdict = session.check(&[("psi".into(), concretize(&psi))], budget.remaining());
    let model = match verdict {
        Ok(Verdict::Sat(m)) => m,
        Ok(Verdict::Unknown(reason)) => {
            if reason.contains("irrational") {
                log::warn!("NRA model has irrational values; discarded");
            }
            return None;
        }
        Ok(Verdict::Unsat(_)) => return None,
        Err(e) => {
            log::warn!("external NRA solver failed: {e}");
            return None;
        }
    };
    let mut lifted = model.restrict(|_| true);
    let mut fmuls = fmuls_of(&query.formula);
    fmuls.extend(fmuls_of(&query.skeleton));
    let fmuls: Vec<Term> = fmuls.into_iter().collect();
    // unconstrained variables are absent from the NRA model; any value works
    for v in crate::terms::vars_of(&query.formula) {
        if lifted.get(&v).is_none() {
            let value = match v.sort {
                crate::terms::Sort::Real => Value::Real(crate::terms::rat::int(0)),
                crate::terms::Sort::Bool => Value::Bool(false),
            };
            lifted.set(v, value);
        }
    }
    lifted.extend_fmuls(&fmuls).ok()?;
    lifts(&query.formula, &lifted).then_some(lifted)
}
