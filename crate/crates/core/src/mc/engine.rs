//! Model checkers for the abstract LRA+EUF system: BMC, k-induction,
//! Houdini-strengthened k-induction, and an external process.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use crate::abstraction::prime;
use crate::smtlib::{serialize_vmt, TransitionSystem};
use crate::solver::{Logic, Session, SolverCommand, SolverError, Verdict};
use crate::terms::{at_time, atoms_of, vars_of, Model, Node, Sort, Term, Time};

use super::unroll::{init_at, states_differ, trans_at};

#[derive(Clone, Debug)]
pub enum EngineResult {
    Proved,
    /// Abstract counterexample with `len` states (frames 0..len-1).
    Cex {
        len: u32,
        model: Model,
    },
    Unknown(String),
}

/// Solver access shared by the engines of one run.
pub struct EngineCtx {
    pub solver: SolverCommand,
    pub deadline: Option<Instant>,
    pub solver_calls: u64,
}

impl EngineCtx {
    pub fn new(solver: SolverCommand, deadline: Option<Instant>) -> EngineCtx {
        EngineCtx {
            solver,
            deadline,
            solver_calls: 0,
        }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }

    pub fn session(&self) -> Result<Session, SolverError> {
        Session::start(&self.solver, Logic::UfLra)
    }

    /// Runs `body` on a fresh session and accounts for its checks.
    pub fn with_session<T>(
        &mut self,
        body: impl FnOnce(&mut Self, &mut Session) -> Result<T, SolverError>,
    ) -> Result<T, SolverError> {
        let mut s = self.session()?;
        let r = body(self, &mut s);
        self.solver_calls += s.stats().checks;
        r
    }

    /// One scratch check; an expired deadline answers `unknown`.
    fn check(&self, s: &mut Session, assertions: &[(String, Term)]) -> Result<Verdict, SolverError> {
        if self.expired() {
            return Ok(Verdict::Unknown("timeout".into()));
        }
        s.check(assertions, self.remaining())
    }
}

fn labeled(label: &str, t: Term) -> Vec<(String, Term)> {
    vec![(label.to_string(), t)]
}

/// Incremental BMC: checks ¬P at depths `start..=max_k`; shallower depths
/// are only unrolled.
pub fn engine_bmc(
    ctx: &mut EngineCtx,
    ts: &TransitionSystem,
    prop: &Term,
    start: u32,
    max_k: u32,
) -> Result<EngineResult, SolverError> {
    ctx.with_session(|ctx, s| {
        s.assert(&init_at(ts))?;
        for d in 0..=max_k {
            if d >= start {
                match ctx.check(s, &labeled("bad", Term::not(at_time(prop, d))))? {
                    Verdict::Sat(model) => return Ok(EngineResult::Cex { len: d + 1, model }),
                    Verdict::Unknown(r) => return Ok(EngineResult::Unknown(r)),
                    Verdict::Unsat(_) => {}
                }
            }
            s.assert(&trans_at(ts, d))?;
        }
        Ok(EngineResult::Unknown(format!("no counterexample up to depth {max_k}")))
    })
}

/// k-induction with simple-path constraints, assuming the invariant `inv`
/// (over current-state variables) in every state of the step case. Base
/// cases shallower than `start` are known to hold and are skipped.
pub fn engine_kind(
    ctx: &mut EngineCtx,
    ts: &TransitionSystem,
    prop: &Term,
    inv: &Term,
    start: u32,
    max_k: u32,
) -> Result<EngineResult, SolverError> {
    let mut base = ctx.session()?;
    let mut step = match ctx.session() {
        Ok(s) => s,
        Err(e) => {
            ctx.solver_calls += base.stats().checks;
            return Err(e);
        }
    };
    let r = kind_loop(ctx, &mut base, &mut step, ts, prop, inv, start, max_k);
    ctx.solver_calls += base.stats().checks + step.stats().checks;
    r
}

#[allow(clippy::too_many_arguments)]
fn kind_loop(
    ctx: &mut EngineCtx,
    base: &mut Session,
    step: &mut Session,
    ts: &TransitionSystem,
    prop: &Term,
    inv: &Term,
    start: u32,
    max_k: u32,
) -> Result<EngineResult, SolverError> {
    let vars = ts.state_vars();
    base.assert(&init_at(ts))?;
    step.assert(&at_time(inv, 0))?;
    for k in 0..=max_k {
        if k >= start {
            match ctx.check(base, &labeled("bad", Term::not(at_time(prop, k))))? {
                Verdict::Sat(model) => return Ok(EngineResult::Cex { len: k + 1, model }),
                Verdict::Unknown(r) => return Ok(EngineResult::Unknown(r)),
                Verdict::Unsat(_) => {}
            }
        }
        base.assert(&trans_at(ts, k))?;

        // k+1 property states, then a violation
        step.assert(&Term::and([at_time(prop, k), trans_at(ts, k), at_time(inv, k + 1)]))?;
        for i in 0..=k {
            step.assert(&states_differ(&vars, i, k + 1))?;
        }
        match ctx.check(step, &labeled("bad", Term::not(at_time(prop, k + 1))))? {
            Verdict::Unsat(_) => return Ok(EngineResult::Proved),
            Verdict::Unknown(r) => return Ok(EngineResult::Unknown(r)),
            Verdict::Sat(_) => {}
        }
    }
    Ok(EngineResult::Unknown(format!("not {max_k}-inductive")))
}

fn is_current(t: &Term) -> bool {
    vars_of(t).iter().all(|v| v.time == Time::Current)
}

/// Candidate invariants: atoms of `sources` over current-state variables,
/// with `<=`/`>=` weakenings of equalities and strict comparisons and both
/// polarities of boolean variables.
pub fn candidates<'a, I: IntoIterator<Item = &'a Term>>(sources: I) -> Vec<Term> {
    let mut out = BTreeSet::new();
    for src in sources {
        for a in atoms_of(src).into_iter().filter(is_current) {
            match a.node() {
                Node::Eq(l, r) if l.sort() == Sort::Real => {
                    out.insert(Term::le(l.clone(), r.clone()));
                    out.insert(Term::ge(l.clone(), r.clone()));
                }
                Node::Lt(l, r) => {
                    out.insert(Term::le(l.clone(), r.clone()));
                }
                Node::Var(_) => {
                    out.insert(Term::not(a.clone()));
                }
                _ => {}
            }
            out.insert(a);
        }
    }
    out.into_iter().filter(|c| !c.is_true() && !c.is_false()).collect()
}

fn holds(m: &Model, t: &Term) -> bool {
    m.eval_bool(t) == Ok(true)
}

/// Largest subset of `cands` that I implies and that is inductive relative
/// to itself. `None` when the solver gives up.
pub fn houdini(
    ctx: &mut EngineCtx,
    ts: &TransitionSystem,
    mut cands: Vec<Term>,
) -> Result<Option<Vec<Term>>, SolverError> {
    let ok = ctx.with_session(|ctx, s| {
        s.assert(&ts.init)?;
        while !cands.is_empty() {
            match ctx.check(s, &labeled("cex", Term::not(Term::and(cands.clone()))))? {
                Verdict::Unsat(_) => break,
                Verdict::Unknown(_) => return Ok(false),
                Verdict::Sat(m) => {
                    let before = cands.len();
                    cands.retain(|c| holds(&m, c));
                    if cands.len() == before {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    })?;
    if !ok {
        return Ok(None);
    }
    let ok = ctx.with_session(|ctx, s| {
        s.assert(&ts.trans)?;
        while !cands.is_empty() {
            let primed: Vec<Term> = cands.iter().map(prime).collect();
            let query = vec![
                ("inv".to_string(), Term::and(cands.clone())),
                ("cex".to_string(), Term::not(Term::and(primed.clone()))),
            ];
            match ctx.check(s, &query)? {
                Verdict::Unsat(_) => break,
                Verdict::Unknown(_) => return Ok(false),
                Verdict::Sat(m) => {
                    let before = cands.len();
                    let keep: Vec<bool> = primed.iter().map(|p| holds(&m, p)).collect();
                    let mut it = keep.into_iter();
                    cands.retain(|_| it.next().unwrap());
                    if cands.len() == before {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    })?;
    Ok(ok.then_some(cands))
}

/// Houdini over the candidates plus the property; proved when the property
/// survives, otherwise k-induction strengthened by the survivors.
pub fn engine_kind_houdini(
    ctx: &mut EngineCtx,
    ts: &TransitionSystem,
    prop: &Term,
    cands: &[Term],
    start: u32,
    max_k: u32,
) -> Result<EngineResult, SolverError> {
    let mut pool: Vec<Term> = cands.to_vec();
    if !pool.contains(prop) {
        pool.push(prop.clone());
    }
    let inv = match houdini(ctx, ts, pool)? {
        Some(survivors) if survivors.contains(prop) => return Ok(EngineResult::Proved),
        Some(survivors) => Term::and(survivors),
        None => Term::tt(),
    };
    engine_kind(ctx, ts, prop, &inv, start, max_k)
}

/// Runs `cmd <file.vmt>` on the abstract system and reads `safe`,
/// `unsafe <k>` or `unknown` from its output; `k` counts transitions. An
/// unsafe answer is replayed with BMC to obtain the abstract model.
pub fn engine_external(
    ctx: &mut EngineCtx,
    cmd: &str,
    ts: &TransitionSystem,
    prop: &Term,
    max_k: u32,
) -> Result<EngineResult, SolverError> {
    let mut single = ts.clone();
    single.properties = vec![crate::smtlib::Property {
        index: 0,
        formula: prop.clone(),
    }];
    let dir = std::env::temp_dir().join(format!("nra-cegar-{}", std::process::id()));
    let io = |e: std::io::Error| SolverError::Spawn {
        command: cmd.to_string(),
        msg: e.to_string(),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let path = dir.join("abstract.vmt");
    std::fs::write(&path, serialize_vmt(&single)).map_err(io)?;
    let parsed = SolverCommand::parse(cmd).ok_or_else(|| SolverError::Spawn {
        command: cmd.to_string(),
        msg: "empty command".into(),
    })?;
    let out = Command::new(&parsed.program)
        .args(&parsed.args)
        .arg(&path)
        .output()
        .map_err(io)?;
    let _ = std::fs::remove_file(&path);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut words = text.split_whitespace();
    match (words.next(), words.next().map(str::parse::<u32>)) {
        (Some("safe"), _) => Ok(EngineResult::Proved),
        (Some("unsafe"), Some(Ok(k))) => match engine_bmc(ctx, ts, prop, 0, k.max(max_k))? {
            EngineResult::Cex { len, model } => Ok(EngineResult::Cex { len, model }),
            _ => Ok(EngineResult::Unknown(format!(
                "external checker reported unsafe {k}, but BMC finds no path"
            ))),
        },
        (Some("unknown"), _) => Ok(EngineResult::Unknown("external checker: unknown".into())),
        _ => Ok(EngineResult::Unknown(format!(
            "unrecognized external checker output: {:?}",
            text.trim()
        ))),
    }
}
