//! Moves lemmas found on unrollings back into the transition system, and
//! shrinks them to those an unsat core needs.

use std::collections::BTreeSet;

use crate::abstraction::prime;
use crate::axiom::Axiom;
use crate::config::ConstrainMode;
use crate::smtlib::TransitionSystem;
use crate::solver::{SolverError, Verdict};
use crate::terms::{at_time, retime, steps_of, untime, Model, Term, Time};

use super::engine::EngineCtx;
use super::unroll::get_cex_formula;

/// Untimed lemmas: `init` over X, `trans` over X ∪ X′.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Refinement {
    pub init: Vec<Axiom>,
    pub trans: Vec<Axiom>,
}

impl Refinement {
    pub fn is_empty(&self) -> bool {
        self.init.is_empty() && self.trans.is_empty()
    }

    pub fn len(&self) -> usize {
        self.init.len() + self.trans.len()
    }

    /// Conjoins the lemmas to I and T.
    pub fn apply(&self, ts: &mut TransitionSystem) {
        let conj = |base: &Term, axs: &[Axiom]| {
            let mut parts = vec![base.clone()];
            parts.extend(axs.iter().map(|a| a.formula.clone()));
            Term::and(parts)
        };
        ts.init = conj(&ts.init, &self.init);
        ts.trans = conj(&ts.trans, &self.trans);
    }

    /// Drops lemmas whose formula is already in `seen`, and duplicates.
    pub fn retain_new(&mut self, seen: &BTreeSet<(bool, Term)>) {
        let mut local = seen.clone();
        self.init.retain(|a| local.insert((true, a.formula.clone())));
        self.trans.retain(|a| local.insert((false, a.formula.clone())));
    }

    pub fn record(&self, seen: &mut BTreeSet<(bool, Term)>) {
        seen.extend(self.init.iter().map(|a| (true, a.formula.clone())));
        seen.extend(self.trans.iter().map(|a| (false, a.formula.clone())));
    }
}

/// Lemmas over one frame `X^0` constrain I; over one later frame `X^i`
/// they constrain T on both X and X′; spanning frames, the lowest frame
/// becomes X and every higher one X′.
pub fn refine_transition_system(gamma: &[Axiom], axioms_everywhere: bool) -> Refinement {
    let mut r = Refinement::default();
    for g in gamma {
        let steps = steps_of(&g.formula);
        let lo = steps.iter().next().copied().unwrap_or(0);
        if steps.len() <= 1 {
            let x = g.map_formula(|f| untime(f, lo).expect("single-frame lemma"));
            if lo == 0 {
                if axioms_everywhere {
                    r.trans.push(x.map_formula(prime));
                    r.trans.push(x.clone());
                }
                r.init.push(x);
            } else {
                r.trans.push(x.map_formula(prime));
                r.trans.push(x);
            }
        } else {
            r.trans.push(g.map_formula(|f| {
                retime(f, |v| match v.time {
                    Time::At(i) if i == lo => Some(Time::Current),
                    Time::At(_) => Some(Time::Next),
                    _ => None,
                })
            }));
        }
    }
    r
}

/// For single-frame lemmas, re-timing their untimed versions gives back the
/// original. Returns the offending lemma otherwise.
pub fn check_round_trip(gamma: &[Axiom], r: &Refinement) -> Result<usize, String> {
    let mut checked = 0;
    for g in gamma {
        let steps = steps_of(&g.formula);
        let Some(&i) = steps.iter().next() else { continue };
        if steps.len() != 1 {
            continue;
        }
        let x = untime(&g.formula, i).map_err(|e| e.to_string())?;
        let ok = if i == 0 {
            r.init.iter().any(|a| a.formula == x) && at_time(&x, 0) == g.formula
        } else {
            let xp = prime(&x);
            r.trans.iter().any(|a| a.formula == x)
                && r.trans.iter().any(|a| a.formula == xp)
                && at_time(&x, i) == g.formula
                && at_time(&xp, i - 1) == g.formula
        };
        if !ok {
            return Err(format!("untiming does not round-trip for {}", g.formula));
        }
        checked += 1;
    }
    Ok(checked)
}

/// How a counterexample formula is rebuilt for reduction.
#[derive(Clone, Copy, Debug)]
pub struct CexShape<'a> {
    pub len: u32,
    pub mode: ConstrainMode,
    pub pin: Option<&'a Model>,
}

#[derive(Clone, Debug)]
pub enum Reduction {
    Reduced(Refinement),
    /// The refined system still admits the counterexample (or the solver
    /// gave up).
    Failed(String),
}

fn instances(r: &Refinement, len: u32) -> Vec<(String, Term)> {
    let mut out = Vec::new();
    for (n, a) in r.init.iter().enumerate() {
        out.push((format!("i{n}"), at_time(&a.formula, 0)));
    }
    for (n, a) in r.trans.iter().enumerate() {
        for j in 0..len.saturating_sub(1) {
            out.push((format!("t{n}@{j}"), at_time(&a.formula, j)));
        }
    }
    out
}

fn keep(r: &Refinement, core: &[String]) -> Refinement {
    let hit = |prefix: char, n: usize| {
        core.iter().any(|l| {
            let mut chars = l.chars();
            chars.next() == Some(prefix) && chars.as_str().split('@').next() == Some(n.to_string().as_str())
        })
    };
    Refinement {
        init: r
            .init
            .iter()
            .enumerate()
            .filter(|(n, _)| hit('i', *n))
            .map(|(_, a)| a.clone())
            .collect(),
        trans: r
            .trans
            .iter()
            .enumerate()
            .filter(|(n, _)| hit('t', *n))
            .map(|(_, a)| a.clone())
            .collect(),
    }
}

/// Rebuilds the counterexample formula over `ts` (not yet refined) with
/// every instance of every lemma named, and keeps the lemmas that occur in
/// the unsat core.
pub fn reduce_axioms(
    ctx: &mut EngineCtx,
    ts: &TransitionSystem,
    prop: &Term,
    shape: CexShape<'_>,
    r: &Refinement,
) -> Result<Reduction, SolverError> {
    let psi = get_cex_formula(ts, prop, shape.len, shape.mode, shape.pin);
    let named = instances(r, shape.len);
    ctx.with_session(|ctx, s| {
        s.assert(&psi)?;
        if ctx.expired() {
            return Ok(Reduction::Failed("timeout".into()));
        }
        match s.check(&named, ctx.remaining())? {
            Verdict::Unsat(core) => Ok(Reduction::Reduced(keep(r, &core))),
            Verdict::Sat(_) => Ok(Reduction::Failed(
                "the refined system still admits the counterexample".into(),
            )),
            Verdict::Unknown(why) => Ok(Reduction::Failed(why)),
        }
    })
}

/// Whether the counterexample formula over `ts` refined by `r` is unsat;
/// `None` when the solver gives up.
pub fn blocks_cex(
    ctx: &mut EngineCtx,
    ts: &TransitionSystem,
    prop: &Term,
    shape: CexShape<'_>,
    r: &Refinement,
) -> Result<Option<bool>, SolverError> {
    let psi = get_cex_formula(ts, prop, shape.len, shape.mode, shape.pin);
    let named = instances(r, shape.len);
    ctx.with_session(|ctx, s| {
        s.assert(&psi)?;
        Ok(match s.check(&named, ctx.remaining())? {
            Verdict::Unsat(_) => Some(true),
            Verdict::Sat(_) => Some(false),
            Verdict::Unknown(_) => None,
        })
    })
}
