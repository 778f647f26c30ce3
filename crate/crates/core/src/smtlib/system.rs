//! Symbolic transition systems ⟨X, I, T⟩ with invariant properties.

use std::collections::BTreeSet;

use crate::terms::{vars_of, Term, Time, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVar {
    /// Current-state copy.
    pub var: Var,
    /// Symbol used for the next-state copy in VMT files.
    pub next_symbol: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub index: u32,
    pub formula: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    pub vars: Vec<StateVar>,
    pub init: Term,
    pub trans: Term,
    pub properties: Vec<Property>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("ill-formed transition system: {0}")]
pub struct SystemError(pub String);

impl TransitionSystem {
    /// Builds a system over `vars` (current-state copies), with default
    /// `name.next` next-state symbols.
    pub fn new(vars: Vec<Var>, init: Term, trans: Term, properties: Vec<Term>) -> TransitionSystem {
        TransitionSystem {
            vars: vars
                .into_iter()
                .map(|v| StateVar {
                    next_symbol: format!("{}.next", v.name),
                    var: v,
                })
                .collect(),
            init,
            trans,
            properties: properties
                .into_iter()
                .enumerate()
                .map(|(i, formula)| Property {
                    index: i as u32,
                    formula,
                })
                .collect(),
        }
    }

    pub fn state_vars(&self) -> Vec<Var> {
        self.vars.iter().map(|s| s.var.clone()).collect()
    }

    pub fn property(&self, index: u32) -> Option<&Term> {
        self.properties.iter().find(|p| p.index == index).map(|p| &p.formula)
    }

    /// Checks vars(I) ⊆ X, vars(T) ⊆ X ∪ X′ and vars(P) ⊆ X.
    pub fn validate(&self) -> Result<(), SystemError> {
        let current: BTreeSet<Var> = self.state_vars().into_iter().collect();
        let next: BTreeSet<Var> = current.iter().map(Var::next).collect();
        let check = |what: &str, t: &Term, allow_next: bool| -> Result<(), SystemError> {
            for v in vars_of(t) {
                let ok = match v.time {
                    Time::Current => current.contains(&v),
                    Time::Next => allow_next && next.contains(&v),
                    Time::At(_) => false,
                };
                if !ok {
                    return Err(SystemError(format!(
                        "{what} mentions `{v}`, which is not a state variable"
                    )));
                }
            }
            Ok(())
        };
        check("the initial-state formula", &self.init, false)?;
        check("the transition relation", &self.trans, true)?;
        for p in &self.properties {
            check(&format!("property {}", p.index), &p.formula, false)?;
        }
        Ok(())
    }
}
