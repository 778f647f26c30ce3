//! Blocking spurious models of the abstraction with linear lemmas.

mod frontier;
mod log;
mod monotonicity;
mod tangent;

use std::collections::{BTreeMap, BTreeSet};

pub use frontier::{frontier_update, Frontier};
pub use log::LemmaLog;
pub use monotonicity::{monotonicity_lemma, monotonicity_lemmas};
pub use tangent::{select_points, tangent_lemma, tangent_plane, tangent_plane_at, PointConfig};

use crate::axiom::Axiom;
use crate::terms::{Model, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefineConfig {
    pub points: PointConfig,
    pub frontiers: bool,
    pub monotonicity: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            points: PointConfig::default(),
            frontiers: true,
            monotonicity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefineError {
    #[error("model is not spurious: every fmul value equals the product of its arguments")]
    NotSpurious,
}

/// Frontiers keyed by application, one store per checker run.
pub type Frontiers = BTreeMap<Term, Frontier>;

/// Applications whose value in `model` differs from the product of their
/// argument values. Applications with a constant argument are skipped.
pub fn spurious_fmuls<'a, I: IntoIterator<Item = &'a Term>>(fmuls: I, model: &Model) -> Vec<Term> {
    fmuls
        .into_iter()
        .filter(|m| is_refinable(m))
        .filter(|m| {
            let (s, t) = m.fmul_args().unwrap();
            match (model.get_fmul(m), model.eval_real(s), model.eval_real(t)) {
                (Some(v), Ok(a), Ok(b)) => a * b != *v,
                _ => false,
            }
        })
        .cloned()
        .collect()
}

pub fn is_refinable(m: &Term) -> bool {
    matches!(m.fmul_args(), Some((s, t)) if s.as_const().is_none() && t.as_const().is_none())
}

/// Tangent lemmas at the selected points and frontier corners of every
/// spurious application, then the violated monotonicity lemmas. Output
/// order is a function of the inputs only.
pub fn refine(
    model: &Model,
    fmuls: &BTreeSet<Term>,
    frontiers: &mut Frontiers,
    cfg: &RefineConfig,
) -> Result<Vec<Axiom>, RefineError> {
    let spurious = spurious_fmuls(fmuls, model);
    if spurious.is_empty() {
        return Err(RefineError::NotSpurious);
    }
    let mut out = Vec::new();
    for m in &spurious {
        let mut points = select_points(m, model, &cfg.points);
        if cfg.frontiers {
            let fr = frontiers.entry(m.clone()).or_default();
            let mut extra = Vec::new();
            for (a, b) in &points {
                let (more, next) = frontier_update(fr, a, b);
                *fr = next;
                extra.extend(more);
            }
            points.extend(extra);
            points = tangent::dedup(points);
        }
        out.extend(points.iter().map(|(a, b)| tangent_lemma(m, a, b)));
    }
    if cfg.monotonicity {
        let all: Vec<Term> = fmuls.iter().cloned().collect();
        out.extend(monotonicity_lemmas(&all, model));
    }
    let mut seen = BTreeSet::new();
    out.retain(|a| seen.insert(a.formula.clone()));
    Ok(out)
}

/// Conjunction of `axioms` under `model`, with values for the applications
/// the axioms introduce chosen consistently with the model's function
/// interpretation.
pub fn blocks(model: &Model, axioms: &[Axiom]) -> bool {
    let mut m = model.clone();
    let mut extra = BTreeSet::new();
    for a in axioms {
        extra.extend(crate::terms::fmuls_of(&a.formula));
    }
    let extra: Vec<Term> = extra.into_iter().collect();
    if m.extend_fmuls(&extra).is_err() {
        return false;
    }
    axioms.iter().any(|a| matches!(m.eval_bool(&a.formula), Ok(false)))
}
