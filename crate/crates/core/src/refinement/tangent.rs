//! Tangent planes of x·y and the lemmas they induce.

use num::{BigInt, Zero};

use crate::axiom::{Axiom, AxiomKind};
use crate::terms::{rat, Model, Rat, Term};

/// b·s + a·t − a·b, the tangent plane of s·t at (a, b).
pub fn tangent_plane_at(a: &Rat, b: &Rat, s: &Term, t: &Term) -> Term {
    Term::add([
        Term::scale(b.clone(), s.clone()),
        Term::scale(a.clone(), t.clone()),
        Term::real(-(a * b)),
    ])
}

/// The tangent plane over the placeholders `x`, `y`.
pub fn tangent_plane(a: &Rat, b: &Rat) -> Term {
    tangent_plane_at(a, b, &Term::real_var("x"), &Term::real_var("y"))
}

/// Tangent lemma for `m = fmul(s, t)` at (a, b): exact values on the two
/// multiplication lines through the point, and the side of the plane the
/// product lies on in each open quadrant around it.
pub fn tangent_lemma(m: &Term, a: &Rat, b: &Rat) -> Axiom {
    let (s, t) = m.fmul_args().expect("fmul term");
    let (ca, cb) = (Term::real(a.clone()), Term::real(b.clone()));
    let plane = tangent_plane_at(a, b, s, t);
    let line_a = Term::eq(Term::fmul(ca.clone(), t.clone()), Term::scale(a.clone(), t.clone()));
    let line_b = Term::eq(Term::fmul(s.clone(), cb.clone()), Term::scale(b.clone(), s.clone()));
    let below = Term::or2(
        Term::and2(Term::gt(s.clone(), ca.clone()), Term::lt(t.clone(), cb.clone())),
        Term::and2(Term::lt(s.clone(), ca.clone()), Term::gt(t.clone(), cb.clone())),
    );
    let above = Term::or2(
        Term::and2(Term::lt(s.clone(), ca.clone()), Term::lt(t.clone(), cb.clone())),
        Term::and2(Term::gt(s.clone(), ca), Term::gt(t.clone(), cb)),
    );
    let formula = Term::and([
        line_a,
        line_b,
        Term::implies(below, Term::lt(m.clone(), plane.clone())),
        Term::implies(above, Term::gt(m.clone(), plane)),
    ]);
    Axiom::new(AxiomKind::Tangent, formula)
        .with_target(m.clone())
        .with_point(a.clone(), b.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    /// Also use (1/μ[m], μ[t]) and (μ[s], 1/μ[m]).
    pub all_points: bool,
    /// Coordinates whose numerator or denominator exceeds this in absolute
    /// value are replaced by their floor and ceiling.
    pub rounding_threshold: BigInt,
}

impl Default for PointConfig {
    fn default() -> Self {
        PointConfig {
            all_points: false,
            rounding_threshold: BigInt::from(1_000_000),
        }
    }
}

fn round_point(a: &Rat, b: &Rat, cfg: &PointConfig, out: &mut Vec<(Rat, Rat)>) {
    let big_a = rat::is_oversized(a, &cfg.rounding_threshold);
    let big_b = rat::is_oversized(b, &cfg.rounding_threshold);
    if !big_a && !big_b {
        out.push((a.clone(), b.clone()));
        return;
    }
    // each replacement keeps the other coordinate exact
    if big_a {
        out.push((rat::floor(a), b.clone()));
        out.push((rat::ceil(a), b.clone()));
    }
    if big_b {
        out.push((a.clone(), rat::floor(b)));
        out.push((a.clone(), rat::ceil(b)));
    }
}

/// Tangent points for a spurious application, in a fixed order and
/// without duplicates.
pub fn select_points(m: &Term, model: &Model, cfg: &PointConfig) -> Vec<(Rat, Rat)> {
    let (s, t) = m.fmul_args().expect("fmul term");
    let (Ok(a), Ok(b)) = (model.eval_real(s), model.eval_real(t)) else {
        return Vec::new();
    };
    let mut raw = vec![(a.clone(), b.clone())];
    if cfg.all_points {
        if let Some(v) = model.get_fmul(m).filter(|v| !v.is_zero()) {
            let inv = v.recip();
            raw.push((inv.clone(), b));
            raw.push((a, inv));
        }
    }
    let mut out = Vec::new();
    for (a, b) in &raw {
        round_point(a, b, cfg, &mut out);
    }
    dedup(out)
}

pub(crate) fn dedup<T: PartialEq>(items: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}
