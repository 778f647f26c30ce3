//! CEGAR over transition systems: check the abstract system, test abstract
//! counterexamples for spuriousness with the SMT(NRA) loop, and move the
//! refuting lemmas back into the system.
//!
//! Why the running example (x, y ≥ 2, x′ = x+1, y′ = y+1, z = x·y,
//! P: z ≥ x+y) is provable this way: x ≥ 2 ∧ y ≥ 2 ∧ z = x·y is inductive
//! and implies P, because x·y − x − y = (x−1)(y−1) − 1 ≥ 0. P alone is not
//! k-inductive for any k: with z = x·y, the path x = y = −k+1, …, 0, 1
//! satisfies P in every state but the last. In the abstraction, Houdini
//! keeps x ≥ 2 and y ≥ 2, and the tangent lemma at (2, 2) gives
//! fmul(x,y) ≥ 2x + 2y − 4 ≥ x + y on that region, which closes the
//! induction.

pub mod engine;
pub mod refine_ts;
pub mod unroll;

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use crate::abstraction::abstract_system;
use crate::config::{Budget, Config, ConstrainMode, Engine};
use crate::nra::{smt_nra_check_ext, AbstractQuery, ExtResult};
use crate::smtlib::{Property, TransitionSystem};
use crate::solver::SolverError;
use crate::stats::Journal;
use crate::terms::{rat, Model, Sort, Term, Value};

pub use engine::{candidates, engine_bmc, engine_kind, engine_kind_houdini, houdini, EngineCtx, EngineResult};
pub use refine_ts::{check_round_trip, reduce_axioms, refine_transition_system, CexShape, Reduction, Refinement};
pub use unroll::{get_cex_formula, unrolling};

/// A concrete path: `states[0]` is initial, consecutive states are related
/// by T and the last state violates the property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<Model>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Exact replay against I, T and ¬P.
    pub fn replay(&self, ts: &TransitionSystem, prop: &Term) -> Result<(), String> {
        let Some(first) = self.states.first() else {
            return Err("empty trace".into());
        };
        let holds = |m: &Model, t: &Term| m.eval_bool(t);
        match holds(first, &ts.init) {
            Ok(true) => {}
            other => return Err(format!("state 0 is not initial ({other:?})")),
        }
        for (i, pair) in self.states.windows(2).enumerate() {
            let mut m = pair[0].clone();
            for (v, val) in pair[1].vars() {
                m.set(v.next(), val.clone());
            }
            match holds(&m, &ts.trans) {
                Ok(true) => {}
                other => return Err(format!("no transition from state {i} to state {} ({other:?})", i + 1)),
            }
        }
        match holds(self.states.last().unwrap(), prop) {
            Ok(false) => Ok(()),
            other => Err(format!("last state does not violate the property ({other:?})")),
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.states.iter().enumerate() {
            writeln!(f, "step {i}:")?;
            for (v, val) in s.vars() {
                writeln!(f, "  {} = {val}", v.name)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    Budget,
    RefinementFailure,
    EngineLimit,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnknownReason::Budget => "budget",
            UnknownReason::RefinementFailure => "refinement-failure",
            UnknownReason::EngineLimit => "engine-limit",
        })
    }
}

#[derive(Clone, Debug)]
pub enum McVerdict {
    Safe,
    Unsafe(Trace),
    Unknown { reason: UnknownReason, detail: String },
}

impl McVerdict {
    fn unknown(reason: UnknownReason, detail: impl Into<String>) -> McVerdict {
        McVerdict::Unknown {
            reason,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum McError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    /// A soundness bug: never reported as a verdict.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Projects frames `0..len` of `model` onto the state variables (absent
/// values default to 0 and false) and replays the result exactly.
pub fn build_trace(ts: &TransitionSystem, prop: &Term, model: &Model, len: u32) -> Result<Trace, McError> {
    let vars = ts.state_vars();
    let states = (0..len)
        .map(|i| {
            let mut s = Model::new();
            for v in &vars {
                let val = model.get(&v.at(i)).cloned().unwrap_or(match v.sort {
                    Sort::Real => Value::Real(rat::int(0)),
                    Sort::Bool => Value::Bool(false),
                });
                s.set(v.clone(), val);
            }
            s
        })
        .collect();
    let trace = Trace { states };
    trace
        .replay(ts, prop)
        .map_err(|e| McError::Internal(format!("counterexample does not replay: {e}")))?;
    Ok(trace)
}

fn engine_error(e: SolverError) -> Result<McVerdict, McError> {
    match e {
        SolverError::Spawn { .. } => Err(McError::Solver(e)),
        other => Ok(McVerdict::unknown(UnknownReason::EngineLimit, other.to_string())),
    }
}

/// Decides whether `prop` (over current-state variables) is an invariant
/// of `ts`.
pub fn vmt_nra_check(
    ts: &TransitionSystem,
    prop: &Term,
    cfg: &Config,
    journal: &mut Journal,
) -> Result<McVerdict, McError> {
    let started = Instant::now();
    let deadline = cfg.timeout.map(|t| started + t);
    let mut ctx = EngineCtx::new(cfg.solver.clone(), deadline);
    let r = cegar(ts, prop, cfg, journal, &mut ctx);
    journal.stats.solver_calls += ctx.solver_calls;
    journal.stats.wall_time += started.elapsed();
    r
}

fn cegar(
    ts: &TransitionSystem,
    prop: &Term,
    cfg: &Config,
    journal: &mut Journal,
    ctx: &mut EngineCtx,
) -> Result<McVerdict, McError> {
    let mut single = ts.clone();
    single.properties = vec![Property {
        index: 0,
        formula: prop.clone(),
    }];
    single.validate().map_err(|e| McError::Input(e.to_string()))?;

    let abs = abstract_system(&single, &cfg.abstraction);
    for a in &abs.static_axioms {
        journal.lemma(a);
    }
    let mut sys = abs.system;
    let phat = sys.properties[0].formula.clone();
    let mut seen: BTreeSet<(bool, Term)> = BTreeSet::new();
    let mut trans_lemmas: Vec<Term> = Vec::new();
    let mut start = 0u32;
    let mut failed_at: Option<u32> = None;

    loop {
        if journal.stats.cegar_iterations >= cfg.max_cegar_iterations as u64 {
            return Ok(McVerdict::unknown(
                UnknownReason::Budget,
                format!("{} CEGAR iterations", cfg.max_cegar_iterations),
            ));
        }
        if ctx.expired() {
            return Ok(McVerdict::unknown(UnknownReason::Budget, "timeout"));
        }
        journal.stats.cegar_iterations += 1;

        let outcome = match cfg.engine {
            Engine::Bmc => engine_bmc(ctx, &sys, &phat, start, cfg.max_k),
            Engine::Kind => engine_kind(ctx, &sys, &phat, &Term::tt(), start, cfg.max_k),
            Engine::KindHoudini => {
                let mut sources = vec![sys.init.clone(), phat.clone()];
                sources.extend(trans_lemmas.iter().cloned());
                let cands = candidates(&sources);
                engine_kind_houdini(ctx, &sys, &phat, &cands, start, cfg.max_k)
            }
            Engine::External => {
                let Some(cmd) = cfg.engine_cmd.as_deref() else {
                    return Err(McError::Input("the external engine needs an engine command".into()));
                };
                engine::engine_external(ctx, cmd, &sys, &phat, cfg.max_k)
            }
        };
        let (len, abstract_model) = match outcome {
            Err(e) => return engine_error(e),
            Ok(EngineResult::Proved) => return Ok(McVerdict::Safe),
            Ok(EngineResult::Unknown(why)) => {
                let reason = if ctx.expired() {
                    UnknownReason::Budget
                } else {
                    UnknownReason::EngineLimit
                };
                return Ok(McVerdict::unknown(reason, why));
            }
            Ok(EngineResult::Cex { len, model }) => (len, model),
        };
        log::debug!("abstract counterexample with {len} states");

        let pin = (cfg.constrain != ConstrainMode::None).then_some(&abstract_model);
        let shape = CexShape {
            len,
            mode: cfg.constrain,
            pin,
        };
        let psi = get_cex_formula(&sys, &phat, len, cfg.constrain, pin);
        let budget = Budget::iterations(cfg.max_refinements).with_deadline(ctx.deadline);
        let gamma = match smt_nra_check_ext(&AbstractQuery::new(psi), cfg, budget, journal) {
            ExtResult::Sat(m) => return Ok(McVerdict::Unsafe(build_trace(&single, prop, &m, len)?)),
            ExtResult::Aborted(why) => return Ok(McVerdict::unknown(UnknownReason::Budget, why)),
            ExtResult::Unsat(gamma) => gamma,
        };

        let mut refinement = refine_transition_system(&gamma, cfg.axioms_everywhere);
        if cfg.self_check {
            let n = check_round_trip(&gamma, &refinement).map_err(McError::Internal)?;
            journal.stats.self_checks += n as u64;
        }
        refinement.retain_new(&seen);

        let mut failure = refinement.is_empty().then(|| "no new lemma".to_string());
        if failure.is_none() && cfg.reduce_axioms {
            match reduce_axioms(ctx, &sys, &phat, shape, &refinement) {
                Err(e) => return engine_error(e),
                Ok(Reduction::Failed(why)) => failure = Some(why),
                Ok(Reduction::Reduced(reduced)) => {
                    if cfg.self_check {
                        match refine_ts::blocks_cex(ctx, &sys, &phat, shape, &reduced) {
                            Ok(Some(false)) => {
                                return Err(McError::Internal(
                                    "reduced lemmas do not block the counterexample".into(),
                                ))
                            }
                            Ok(Some(true)) => journal.stats.self_checks += 1,
                            Ok(None) => {}
                            Err(e) => return engine_error(e),
                        }
                    }
                    log::debug!("reduced {} lemmas to {}", refinement.len(), reduced.len());
                    refinement = reduced;
                }
            }
        }
        match failure {
            Some(why) if failed_at == Some(len) => {
                return Ok(McVerdict::unknown(UnknownReason::RefinementFailure, why));
            }
            Some(why) => {
                log::debug!("refinement failure at length {len} ({why}); keeping all lemmas");
                failed_at = Some(len);
            }
            None => failed_at = None,
        }
        refinement.record(&mut seen);
        trans_lemmas.extend(refinement.trans.iter().map(|a| a.formula.clone()));
        refinement.apply(&mut sys);
        start = len - 1;
    }
}
