//! Unrollings of a transition system over timed copies of its variables.

use crate::config::ConstrainMode;
use crate::smtlib::TransitionSystem;
use crate::terms::{at_time, Model, Sort, Term, Var};

pub fn init_at(ts: &TransitionSystem) -> Term {
    at_time(&ts.init, 0)
}

/// T[X^i, X^(i+1)].
pub fn trans_at(ts: &TransitionSystem, i: u32) -> Term {
    at_time(&ts.trans, i)
}

/// I[X^0] ∧ T[X^0,X^1] ∧ ... ∧ T[X^(k-2),X^(k-1)]: paths of `k` states.
pub fn unrolling(ts: &TransitionSystem, k: u32) -> Term {
    assert!(k >= 1, "an unrolling has at least one state");
    let mut parts = vec![init_at(ts)];
    parts.extend((0..k - 1).map(|i| trans_at(ts, i)));
    Term::and(parts)
}

/// Unrolling of `k` states ending in a ¬P state, optionally pinned to the
/// abstract counterexample `pi`.
pub fn get_cex_formula(ts: &TransitionSystem, prop: &Term, k: u32, mode: ConstrainMode, pi: Option<&Model>) -> Term {
    let mut parts = vec![unrolling(ts, k), Term::not(at_time(prop, k - 1))];
    if let (Some(pi), true) = (pi, mode != ConstrainMode::None) {
        for i in 0..k {
            for v in ts.state_vars() {
                if mode == ConstrainMode::Bool && v.sort != Sort::Bool {
                    continue;
                }
                let timed = v.at(i);
                if let Some(val) = pi.get(&timed) {
                    parts.push(Term::eq(Term::var(timed), val.to_term()));
                }
            }
        }
    }
    Term::and(parts)
}

/// Some state variable differs between steps `i` and `j`.
pub fn states_differ(vars: &[Var], i: u32, j: u32) -> Term {
    Term::or(
        vars.iter()
            .map(|v| Term::not(Term::eq(Term::var(v.at(i)), Term::var(v.at(j))))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smtlib::parse_vmt;
    use crate::terms::rat::int;
    use crate::terms::Value;

    const COUNTER: &str = "\
(declare-fun x () Real)
(declare-fun x.next () Real)
(define-fun .x () Real (! x :next x.next))
(define-fun init () Bool (! (= x 0) :init true))
(define-fun trans () Bool (! (= x.next (+ x 1)) :trans true))
(define-fun p () Bool (! (>= x 0) :invar-property 0))
";

    fn xi(i: u32) -> Term {
        Term::var(Var::new("x", Sort::Real).at(i))
    }

    #[test]
    fn one_state() {
        let ts = parse_vmt(COUNTER).unwrap();
        let p = ts.property(0).unwrap();
        let f = get_cex_formula(&ts, p, 1, ConstrainMode::None, None);
        assert_eq!(
            f,
            Term::and([Term::eq(xi(0), Term::int(0)), Term::not(Term::ge(xi(0), Term::int(0)))])
        );
    }

    #[test]
    fn two_states_pinned() {
        let ts = parse_vmt(COUNTER).unwrap();
        let p = ts.property(0).unwrap();
        let plain = get_cex_formula(&ts, p, 2, ConstrainMode::None, None);
        let expected = Term::and([
            Term::eq(xi(0), Term::int(0)),
            Term::eq(xi(1), Term::add([xi(0), Term::int(1)])),
            Term::not(Term::ge(xi(1), Term::int(0))),
        ]);
        assert_eq!(plain, expected);
        let mut pi = Model::new();
        let x = Var::new("x", Sort::Real);
        pi.set(x.at(0), Value::Real(int(2)));
        pi.set(x.at(1), Value::Real(int(3)));
        let full = get_cex_formula(&ts, p, 2, ConstrainMode::Full, Some(&pi));
        let pinned = Term::and([expected, Term::eq(xi(0), Term::int(2)), Term::eq(xi(1), Term::int(3))]);
        assert_eq!(full, pinned);
        assert_eq!(get_cex_formula(&ts, p, 2, ConstrainMode::Bool, Some(&pi)), plain);
    }
}
