//! Substitution, timing and syntactic queries.

use std::collections::{BTreeMap, BTreeSet};

use super::term::{Node, Term, Time, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("substitution for `{var}` changes its sort")]
    SortMismatch { var: String },
    #[error("cannot untime `{var}` at step {step}: only steps {step} and {step}+1 may occur")]
    Untime { var: String, step: u32 },
}

/// Simultaneous substitution of variables by terms.
pub fn substitute(t: &Term, map: &BTreeMap<Var, Term>) -> Result<Term, TermError> {
    for (v, r) in map {
        if v.sort != r.sort() {
            return Err(TermError::SortMismatch { var: v.symbol() });
        }
    }
    if map.is_empty() {
        // rebuild anyway so that canonical order is re-established
        return Ok(t.map_bottom_up(&mut |_| None));
    }
    Ok(t.map_bottom_up(&mut |u| match u.node() {
        Node::Var(v) => map.get(v).cloned(),
        _ => None,
    }))
}

/// Renames every variable's time tag through `f`; `None` leaves it alone.
pub fn retime<F: FnMut(&Var) -> Option<Time>>(t: &Term, mut f: F) -> Term {
    t.map_bottom_up(&mut |u| match u.node() {
        Node::Var(v) => f(v).map(|time| Term::var(v.with_time(time))),
        _ => None,
    })
}

/// `x ↦ x^i`, `x' ↦ x^(i+1)`. Already-timed variables are left alone.
pub fn at_time(t: &Term, step: u32) -> Term {
    retime(t, |v| match v.time {
        Time::Current => Some(Time::At(step)),
        Time::Next => Some(Time::At(step + 1)),
        Time::At(_) => None,
    })
}

/// Inverse of [`at_time`]: `x^i ↦ x`, `x^(i+1) ↦ x'`.
pub fn untime(t: &Term, step: u32) -> Result<Term, TermError> {
    for v in vars_of(t) {
        let ok = matches!(v.time, Time::At(j) if j == step || j == step + 1);
        if !ok {
            return Err(TermError::Untime { var: v.symbol(), step });
        }
    }
    Ok(retime(t, |v| match v.time {
        Time::At(j) if j == step => Some(Time::Current),
        _ => Some(Time::Next),
    }))
}

pub fn vars_of(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    t.visit(&mut |u| {
        if let Node::Var(v) = u.node() {
            out.insert(v.clone());
        }
    });
    out
}

/// Step indices of the timed variables occurring in `t`.
pub fn steps_of(t: &Term) -> BTreeSet<u32> {
    vars_of(t)
        .into_iter()
        .filter_map(|v| match v.time {
            Time::At(i) => Some(i),
            _ => None,
        })
        .collect()
}

fn is_connective(t: &Term) -> bool {
    match t.node() {
        Node::Not(_) | Node::And(_) | Node::Or(_) | Node::Implies(..) | Node::Iff(..) => true,
        Node::Ite(..) => t.is_bool(),
        _ => false,
    }
}

/// Boolean atoms: maximal boolean subterms whose head is not a connective
/// (comparisons and boolean variables). Sorted, duplicate-free.
pub fn atoms_of(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack = vec![t.clone()];
    while let Some(u) = stack.pop() {
        if !seen.insert(u.clone()) {
            continue;
        }
        if is_connective(&u) {
            stack.extend(u.children().into_iter().cloned());
        } else if u.is_bool() && u.as_bool_const().is_none() {
            out.insert(u);
        }
    }
    out
}

/// All `fmul` applications, including nested ones. Sorted, duplicate-free.
pub fn fmuls_of(t: &Term) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    t.visit(&mut |u| {
        if u.fmul_args().is_some() {
            out.insert(u.clone());
        }
    });
    out
}

pub fn contains_mul(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |u| found |= matches!(u.node(), Node::Mul(..)));
    found
}

pub fn contains_fmul(t: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |u| found |= u.fmul_args().is_some());
    found
}
