//! Per-application frontiers: the box inside which both an upper and a
//! lower tangent bound on the product are already available.

use std::fmt;

use crate::terms::{rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    pub lx: Rat,
    pub ux: Rat,
    pub ly: Rat,
    pub uy: Rat,
}

impl Default for Frontier {
    fn default() -> Self {
        let z = rat::int(0);
        Frontier {
            lx: z.clone(),
            ux: z.clone(),
            ly: z.clone(),
            uy: z,
        }
    }
}

impl Frontier {
    pub fn new(lx: Rat, ux: Rat, ly: Rat, uy: Rat) -> Frontier {
        assert!(lx <= ux && ly <= uy, "frontier bounds out of order");
        Frontier { lx, ux, ly, uy }
    }

    pub fn contains(&self, other: &Frontier) -> bool {
        self.lx <= other.lx && other.ux <= self.ux && self.ly <= other.ly && other.uy <= self.uy
    }
}

impl fmt::Display for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{}, {}, {}, {}>",
            rat::to_plain(&self.lx),
            rat::to_plain(&self.ux),
            rat::to_plain(&self.ly),
            rat::to_plain(&self.uy)
        )
    }
}

/// Extra tangent points for a lemma at (a, b) and the widened frontier.
///
/// Outside on both axes, the point becomes a corner of the new box and the
/// two adjacent corners are instantiated. Outside on one axis only, that
/// interval is extended to the point and both corners of the new edge are
/// instantiated. Inside, nothing changes.
pub fn frontier_update(fr: &Frontier, a: &Rat, b: &Rat) -> (Vec<(Rat, Rat)>, Frontier) {
    let Frontier { lx, ux, ly, uy } = fr.clone();
    let (below_x, above_x) = (a < &lx, a > &ux);
    let (below_y, above_y) = (b < &ly, b > &uy);
    let (a, b) = (a.clone(), b.clone());
    let (points, next) = match (below_x, above_x, below_y, above_y) {
        (true, _, true, _) => (
            vec![(a.clone(), uy.clone()), (ux.clone(), b.clone())],
            Frontier { lx: a, ux, ly: b, uy },
        ),
        (true, _, _, true) => (
            vec![(a.clone(), ly.clone()), (ux.clone(), b.clone())],
            Frontier { lx: a, ux, ly, uy: b },
        ),
        (_, true, _, true) => (
            vec![(a.clone(), ly.clone()), (lx.clone(), b.clone())],
            Frontier { lx, ux: a, ly, uy: b },
        ),
        (_, true, true, _) => (
            vec![(a.clone(), uy.clone()), (lx.clone(), b.clone())],
            Frontier { lx, ux: a, ly: b, uy },
        ),
        (true, _, false, false) => (
            vec![(a.clone(), ly.clone()), (a.clone(), uy.clone())],
            Frontier { lx: a, ux, ly, uy },
        ),
        (_, true, false, false) => (
            vec![(a.clone(), ly.clone()), (a.clone(), uy.clone())],
            Frontier { lx, ux: a, ly, uy },
        ),
        (false, false, true, _) => (
            vec![(lx.clone(), b.clone()), (ux.clone(), b.clone())],
            Frontier { lx, ux, ly: b, uy },
        ),
        (false, false, _, true) => (
            vec![(lx.clone(), b.clone()), (ux.clone(), b.clone())],
            Frontier { lx, ux, ly, uy: b },
        ),
        (false, false, false, false) => (Vec::new(), fr.clone()),
    };
    (super::tangent::dedup(points), next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::rat::int;

    fn fr(lx: i64, ux: i64, ly: i64, uy: i64) -> Frontier {
        Frontier::new(int(lx), int(ux), int(ly), int(uy))
    }

    fn pts(v: &[(i64, i64)]) -> Vec<(Rat, Rat)> {
        v.iter().map(|&(a, b)| (int(a), int(b))).collect()
    }

    #[test]
    fn inside_is_a_no_op() {
        let f = fr(0, 2, 0, 3);
        assert_eq!(frontier_update(&f, &int(1), &int(1)), (Vec::new(), f));
    }

    #[test]
    fn one_axis_outside() {
        let (p, f) = frontier_update(&fr(0, 2, 0, 3), &int(5), &int(1));
        assert_eq!(p, pts(&[(5, 0), (5, 3)]));
        assert_eq!(f, fr(0, 5, 0, 3));
        let (p, f) = frontier_update(&fr(0, 0, 0, 0), &int(0), &int(-4));
        assert_eq!(p, pts(&[(0, -4)]));
        assert_eq!(f, fr(0, 0, -4, 0));
    }
}
