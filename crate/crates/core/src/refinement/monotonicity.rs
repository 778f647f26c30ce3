//! Monotonicity lemmas: larger factors in absolute value give a larger
//! product in absolute value.

use num::Signed;

use crate::axiom::{Axiom, AxiomKind};
use crate::terms::{Model, Rat, Term};

/// (|s|≤|w| ∧ |t|≤|z|) → |m1|≤|m2| for m1 = fmul(s,t), m2 = fmul(w,z);
/// with `swapped`, m2's arguments are taken in the other order.
pub fn monotonicity_lemma(m1: &Term, m2: &Term, swapped: bool) -> Axiom {
    let (s, t) = m1.fmul_args().expect("fmul term");
    let (w, z) = m2.fmul_args().expect("fmul term");
    let (w, z) = if swapped { (z, w) } else { (w, z) };
    let premise = Term::and2(
        Term::le(Term::abs(s.clone()), Term::abs(w.clone())),
        Term::le(Term::abs(t.clone()), Term::abs(z.clone())),
    );
    let formula = Term::implies(premise, Term::le(Term::abs(m1.clone()), Term::abs(m2.clone())));
    Axiom::new(AxiomKind::Monotonicity, formula).with_target(m1.clone())
}

fn abs_values(m: &Term, model: &Model) -> Option<(Rat, Rat, Rat)> {
    let (s, t) = m.fmul_args()?;
    let v = model.get_fmul(m)?;
    Some((model.eval_real(s).ok()?.abs(), model.eval_real(t).ok()?.abs(), v.abs()))
}

fn symbolic(m: &Term) -> bool {
    matches!(m.fmul_args(), Some((s, t)) if s.as_const().is_none() && t.as_const().is_none())
}

/// Every lemma over an ordered pair of distinct applications that the
/// model violates, in both argument pairings. Pairs where both sides have
/// a constant argument are skipped: their lemmas are linear consequences
/// of the multiplication lines.
pub fn monotonicity_lemmas(fmuls: &[Term], model: &Model) -> Vec<Axiom> {
    let vals: Vec<Option<(Rat, Rat, Rat)>> = fmuls.iter().map(|m| abs_values(m, model)).collect();
    let mut out = Vec::new();
    for (i, m1) in fmuls.iter().enumerate() {
        let Some((s, t, v1)) = &vals[i] else { continue };
        for (j, m2) in fmuls.iter().enumerate() {
            if i == j || !(symbolic(m1) || symbolic(m2)) {
                continue;
            }
            let Some((w, z, v2)) = &vals[j] else { continue };
            if v1 <= v2 {
                continue;
            }
            if s <= w && t <= z {
                out.push(monotonicity_lemma(m1, m2, false));
            } else if s <= z && t <= w {
                out.push(monotonicity_lemma(m1, m2, true));
            }
        }
    }
    out
}
