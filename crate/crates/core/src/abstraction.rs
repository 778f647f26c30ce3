//! LRA+EUF over-approximation of NRA: every non-linear `mul` becomes an
//! uninterpreted `fmul`, constrained by sign and zero axioms.

use std::collections::BTreeSet;

use crate::axiom::{Axiom, AxiomKind};
use crate::smtlib::TransitionSystem;
use crate::terms::{fmuls_of, retime, Node, Term, Time};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbstractionConfig {
    /// fmul(x,y) = fmul(-x,-y) = -fmul(-x,y) = -fmul(x,-y).
    pub sign_axioms: bool,
    /// Emit fmul(x,y) = fmul(y,x) even though argument order makes it
    /// structurally true.
    pub commutativity: bool,
}

impl Default for AbstractionConfig {
    fn default() -> Self {
        AbstractionConfig {
            sign_axioms: true,
            commutativity: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AbstractionResult {
    pub abstract_formula: Term,
    /// Applications in the abstract formula plus those introduced by the
    /// sign axioms.
    pub fmuls: BTreeSet<Term>,
    pub static_axioms: Vec<Axiom>,
}

impl AbstractionResult {
    /// Abstract formula conjoined with its static axioms.
    pub fn constrained(&self) -> Term {
        let mut parts = vec![self.abstract_formula.clone()];
        parts.extend(self.static_axioms.iter().map(|a| a.formula.clone()));
        Term::and(parts)
    }
}

/// Replaces `mul` by `fmul`.
pub fn abstract_term(t: &Term) -> Term {
    t.map_bottom_up(&mut |u| match u.node() {
        Node::Mul(a, b) => Some(Term::fmul(a.clone(), b.clone())),
        _ => None,
    })
}

/// Replaces `fmul` by `mul`.
pub fn concretize(t: &Term) -> Term {
    t.map_bottom_up(&mut |u| match u.node() {
        Node::Fmul(a, b) => Some(Term::mul(a.clone(), b.clone())),
        _ => None,
    })
}

pub fn abstract_formula(phi: &Term, cfg: &AbstractionConfig) -> AbstractionResult {
    let abstract_formula = abstract_term(phi);
    let (static_axioms, fmuls) = static_axioms(&fmuls_of(&abstract_formula), cfg);
    AbstractionResult {
        abstract_formula,
        fmuls,
        static_axioms,
    }
}

fn both_symbolic(m: &Term) -> bool {
    let (s, t) = m.fmul_args().expect("fmul term");
    s.as_const().is_none() && t.as_const().is_none()
}

/// Static axioms for each application, and the application set closed
/// under the terms the sign axioms introduce. Applications with a constant
/// argument are already linear and get none.
pub fn static_axioms(fmuls: &BTreeSet<Term>, cfg: &AbstractionConfig) -> (Vec<Axiom>, BTreeSet<Term>) {
    let mut all = fmuls.clone();
    let mut out = Vec::new();
    for m in fmuls.iter().filter(|m| both_symbolic(m)) {
        let (s, t) = m.fmul_args().unwrap();
        let (s, t) = (s.clone(), t.clone());
        let zero = Term::int(0);
        let mut parts = Vec::new();
        if cfg.commutativity {
            parts.push(Term::eq(m.clone(), Term::fmul(t.clone(), s.clone())));
        }
        if cfg.sign_axioms {
            let nn = Term::fmul(Term::neg(s.clone()), Term::neg(t.clone()));
            let ns = Term::fmul(Term::neg(s.clone()), t.clone());
            let nt = Term::fmul(s.clone(), Term::neg(t.clone()));
            parts.push(Term::eq(m.clone(), nn.clone()));
            parts.push(Term::eq(m.clone(), Term::neg(ns.clone())));
            parts.push(Term::eq(m.clone(), Term::neg(nt.clone())));
            all.extend([nn, ns, nt]);
        }
        let m_zero = Term::eq(m.clone(), zero.clone());
        if s == t {
            parts.push(Term::iff(Term::eq(s.clone(), zero.clone()), m_zero));
            parts.push(Term::implies(
                Term::distinct(s.clone(), zero.clone()),
                Term::gt(m.clone(), zero.clone()),
            ));
        } else {
            let pos = |u: &Term| Term::gt(u.clone(), Term::int(0));
            let neg = |u: &Term| Term::lt(u.clone(), Term::int(0));
            parts.push(Term::iff(
                Term::or2(Term::eq(s.clone(), zero.clone()), Term::eq(t.clone(), zero.clone())),
                m_zero,
            ));
            parts.push(Term::implies(
                Term::or2(Term::and2(pos(&s), pos(&t)), Term::and2(neg(&s), neg(&t))),
                Term::gt(m.clone(), zero.clone()),
            ));
            parts.push(Term::implies(
                Term::or2(Term::and2(neg(&s), pos(&t)), Term::and2(pos(&s), neg(&t))),
                Term::lt(m.clone(), zero.clone()),
            ));
        }
        out.push(Axiom::new(AxiomKind::Static, Term::and(parts)).with_target(m.clone()));
    }
    (out, all)
}

/// Abstract transition system plus the bookkeeping refinement needs.
#[derive(Clone, Debug)]
pub struct AbstractSystem {
    pub system: TransitionSystem,
    /// Every application over current-state variables that the static
    /// axioms speak about; next-state copies are implied.
    pub fmuls: BTreeSet<Term>,
    pub static_axioms: Vec<Axiom>,
}

pub fn prime(t: &Term) -> Term {
    retime(t, |v| (v.time == Time::Current).then_some(Time::Next))
}

pub fn unprime(t: &Term) -> Term {
    retime(t, |v| (v.time == Time::Next).then_some(Time::Current))
}

fn frame_of(t: &Term) -> Option<Time> {
    let times: BTreeSet<Time> = crate::terms::vars_of(t).into_iter().map(|v| v.time).collect();
    match times.len() {
        0 => Some(Time::Current),
        1 => times.into_iter().next(),
        _ => None,
    }
}

/// Abstracts I, T and every property. Static axioms go into Î for the
/// applications of Î and of the properties, and into T̂ for the
/// applications of T̂, Î and the properties, each over both X and X′.
pub fn abstract_system(ts: &TransitionSystem, cfg: &AbstractionConfig) -> AbstractSystem {
    let init = abstract_term(&ts.init);
    let trans = abstract_term(&ts.trans);
    let props: Vec<Term> = ts.properties.iter().map(|p| abstract_term(&p.formula)).collect();

    let mut current: BTreeSet<Term> = fmuls_of(&init);
    for p in &props {
        current.extend(fmuls_of(p));
    }
    let init_fmuls = current.clone();
    let mut mixed = BTreeSet::new();
    for m in fmuls_of(&trans) {
        match frame_of(&m) {
            Some(Time::Current) => {
                current.insert(m);
            }
            Some(Time::Next) => {
                current.insert(unprime(&m));
            }
            _ => {
                mixed.insert(m);
            }
        }
    }

    let (init_axioms, _) = static_axioms(&init_fmuls, cfg);
    let (cur_axioms, closed) = static_axioms(&current, cfg);
    let (mixed_axioms, _) = static_axioms(&mixed, cfg);

    let conj = |base: Term, axs: &[Axiom]| {
        let mut parts = vec![base];
        parts.extend(axs.iter().map(|a| a.formula.clone()));
        Term::and(parts)
    };
    let mut trans_axioms: Vec<Axiom> = cur_axioms.clone();
    trans_axioms.extend(cur_axioms.iter().map(|a| a.map_formula(prime)));
    trans_axioms.extend(mixed_axioms);

    let mut system = ts.clone();
    system.init = conj(init, &init_axioms);
    system.trans = conj(trans, &trans_axioms);
    for (p, f) in system.properties.iter_mut().zip(props) {
        p.formula = f;
    }
    let mut static_all = init_axioms;
    static_all.extend(trans_axioms);
    AbstractSystem {
        system,
        fmuls: closed,
        static_axioms: static_all,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smtlib::parse_smt2_formula;
    use crate::terms::contains_mul;

    fn p(s: &str) -> Term {
        parse_smt2_formula(s).unwrap()
    }

    #[test]
    fn mul_becomes_fmul() {
        let r = abstract_formula(&p("(>= (* x y) z)"), &AbstractionConfig::default());
        let m = Term::fmul(Term::real_var("x"), Term::real_var("y"));
        assert_eq!(r.abstract_formula, Term::ge(m.clone(), Term::real_var("z")));
        assert!(r.fmuls.contains(&m));
        assert_eq!(r.fmuls.len(), 4, "sign axioms add three applications");
    }

    #[test]
    fn scale_is_untouched() {
        let r = abstract_formula(&p("(>= (+ (* 3 x) (* x x)) 0)"), &AbstractionConfig::default());
        let x = Term::real_var("x");
        let expected = Term::ge(
            Term::add([
                Term::scale(crate::terms::rat::int(3), x.clone()),
                Term::fmul(x.clone(), x),
            ]),
            Term::int(0),
        );
        assert_eq!(r.abstract_formula, expected);
    }

    #[test]
    fn linear_is_unchanged() {
        let f = p("(>= (+ x y) 0)");
        let r = abstract_formula(&f, &AbstractionConfig::default());
        assert_eq!(r.abstract_formula, f);
        assert!(r.fmuls.is_empty() && r.static_axioms.is_empty());
    }

    #[test]
    fn square_zero_axiom_degenerates() {
        let x = Term::real_var("x");
        let m = Term::fmul(x.clone(), x.clone());
        let cfg = AbstractionConfig {
            sign_axioms: false,
            commutativity: false,
        };
        let (axs, _) = static_axioms(&[m.clone()].into(), &cfg);
        let expected = Term::and([
            Term::iff(Term::eq(x.clone(), Term::int(0)), Term::eq(m.clone(), Term::int(0))),
            Term::implies(Term::distinct(x, Term::int(0)), Term::gt(m, Term::int(0))),
        ]);
        assert_eq!(axs[0].formula, expected);
    }

    #[test]
    fn concretize_inverts() {
        let f = p("(and (<= (* x (+ y 1)) 3) (> (* y y) x))");
        let r = abstract_formula(&f, &AbstractionConfig::default());
        assert!(!contains_mul(&r.abstract_formula));
        assert_eq!(concretize(&r.abstract_formula), f);
    }

    #[test]
    fn commutativity_is_trivially_true() {
        let cfg = AbstractionConfig {
            sign_axioms: false,
            commutativity: true,
        };
        let m = Term::fmul(Term::real_var("x"), Term::real_var("y"));
        let (axs, _) = static_axioms(&[m].into(), &cfg);
        let Node::And(parts) = axs[0].formula.node() else {
            panic!()
        };
        assert_eq!(parts.len(), 3, "the commutativity conjunct folds to true");
    }
}
