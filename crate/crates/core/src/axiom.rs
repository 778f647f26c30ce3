//! Lemmas added to an abstraction, with their provenance.

use std::fmt;

use crate::smtlib::term_to_smtlib;
use crate::terms::{rat, Rat, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AxiomKind {
    Static,
    Tangent,
    Monotonicity,
}

impl AxiomKind {
    pub fn name(self) -> &'static str {
        match self {
            AxiomKind::Static => "static",
            AxiomKind::Tangent => "tangent",
            AxiomKind::Monotonicity => "monotonicity",
        }
    }
}

/// A formula valid in NRA once `fmul` is read as multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axiom {
    pub formula: Term,
    pub kind: AxiomKind,
    /// The `fmul` application the lemma was generated for.
    pub target: Option<Term>,
    /// Tangent point, for tangent lemmas.
    pub point: Option<(Rat, Rat)>,
}

impl Axiom {
    pub fn new(kind: AxiomKind, formula: Term) -> Axiom {
        Axiom {
            formula,
            kind,
            target: None,
            point: None,
        }
    }

    pub fn with_target(mut self, t: Term) -> Axiom {
        self.target = Some(t);
        self
    }

    pub fn with_point(mut self, a: Rat, b: Rat) -> Axiom {
        self.point = Some((a, b));
        self
    }

    /// Same provenance, different formula (used when re-timing lemmas).
    pub fn map_formula<F: FnOnce(&Term) -> Term>(&self, f: F) -> Axiom {
        Axiom {
            formula: f(&self.formula),
            ..self.clone()
        }
    }

    /// One-line s-expression for lemma logs.
    pub fn to_sexp(&self) -> String {
        let mut out = format!("(lemma :kind {}", self.kind.name());
        if let Some(t) = &self.target {
            out.push_str(&format!(" :target {}", term_to_smtlib(t)));
        }
        if let Some((a, b)) = &self.point {
            out.push_str(&format!(" :point ({} {})", rat::to_smtlib(a), rat::to_smtlib(b)));
        }
        out.push_str(&format!(" {})", term_to_smtlib(&self.formula)));
        out
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexp())
    }
}

/// Lemma counts by kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LemmaCounts {
    pub static_: u64,
    pub tangent: u64,
    pub monotonicity: u64,
}

impl LemmaCounts {
    pub fn record(&mut self, a: &Axiom) {
        match a.kind {
            AxiomKind::Static => self.static_ += 1,
            AxiomKind::Tangent => self.tangent += 1,
            AxiomKind::Monotonicity => self.monotonicity += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.static_ + self.tangent + self.monotonicity
    }

    pub fn add(&mut self, other: &LemmaCounts) {
        self.static_ += other.static_;
        self.tangent += other.tangent;
        self.monotonicity += other.monotonicity;
    }
}
