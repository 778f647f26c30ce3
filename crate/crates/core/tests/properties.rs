//! Algebraic properties of terms, printing, abstraction and frontiers on
//! randomly generated inputs.

use std::collections::BTreeMap;

use proptest::prelude::*;

use nra_cegar::abstraction::{abstract_term, concretize, prime, unprime};
use nra_cegar::refinement::{frontier_update, Frontier};
use nra_cegar::smtlib::{formula_to_script, parse_smt2_formula};
use nra_cegar::terms::rat::ratio;
use nra_cegar::terms::{at_time, evaluate, substitute, untime, Model, Rat, Sort, Term, Time, Value, Var};

const REAL_NAMES: [&str; 3] = ["x", "y", "z"];
const BOOL_NAMES: [&str; 2] = ["p", "q"];

fn rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| ratio(n, d))
}

fn time() -> impl Strategy<Value = Time> {
    prop_oneof![3 => Just(Time::Current), 1 => Just(Time::Next)]
}

fn real_leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0..REAL_NAMES.len(), time()).prop_map(|(i, t)| Term::var(Var::new(REAL_NAMES[i], Sort::Real).with_time(t))),
        rat().prop_map(Term::real),
    ]
}

fn real_term() -> impl Strategy<Value = Term> {
    real_leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Term::add),
            (rat(), inner.clone()).prop_map(|(c, t)| Term::scale(c, t)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
            (bool_atom(), inner.clone(), inner).prop_map(|(c, a, b)| Term::ite(c, a, b)),
        ]
    })
}

fn bool_atom() -> impl Strategy<Value = Term> {
    (0..BOOL_NAMES.len(), time()).prop_map(|(i, t)| Term::var(Var::new(BOOL_NAMES[i], Sort::Bool).with_time(t)))
}

fn formula() -> impl Strategy<Value = Term> {
    let atom = prop_oneof![
        bool_atom(),
        (real_term(), real_term()).prop_map(|(a, b)| Term::le(a, b)),
        (real_term(), real_term()).prop_map(|(a, b)| Term::lt(a, b)),
        (real_term(), real_term()).prop_map(|(a, b)| Term::eq(a, b)),
    ];
    atom.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Term::and),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Term::or),
            inner.clone().prop_map(Term::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::iff(a, b)),
        ]
    })
}

/// Values for every current and next variable.
fn model() -> impl Strategy<Value = Model> {
    (prop::collection::vec(rat(), 6), prop::collection::vec(any::<bool>(), 4)).prop_map(|(reals, bools)| {
        let mut m = Model::new();
        for (k, r) in reals.into_iter().enumerate() {
            let v = Var::new(REAL_NAMES[k % 3], Sort::Real);
            m.set_real(if k < 3 { v } else { v.next() }, r);
        }
        for (k, b) in bools.into_iter().enumerate() {
            let v = Var::new(BOOL_NAMES[k % 2], Sort::Bool);
            m.set(if k < 2 { v } else { v.next() }, Value::Bool(b));
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        let text = formula_to_script(&f);
        let back = parse_smt2_formula(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn substitution_commutes_with_evaluation(f in formula(), u in real_term(), m in model()) {
        let x = Var::new("x", Sort::Real);
        let replaced = substitute(&f, &BTreeMap::from([(x.clone(), u.clone())])).unwrap();
        let mut shifted = m.clone();
        shifted.set(x, evaluate(&u, &m).unwrap());
        prop_assert_eq!(evaluate(&replaced, &m).unwrap(), evaluate(&f, &shifted).unwrap());
    }

    #[test]
    fn timing_round_trips(f in formula(), step in 0u32..6) {
        let timed = at_time(&f, step);
        prop_assert_eq!(untime(&timed, step).unwrap(), f.clone());
        if nra_cegar::terms::vars_of(&f).iter().any(|v| v.time == Time::Current) {
            prop_assert!(untime(&timed, step + 1).is_err());
        }
    }

    #[test]
    fn abstraction_is_undone_by_concretization(f in formula()) {
        prop_assert_eq!(concretize(&abstract_term(&f)), f);
    }

    #[test]
    fn priming_a_current_formula_round_trips(f in formula()) {
        let current = unprime(&f);
        prop_assert_eq!(unprime(&prime(&current)), current);
    }

    #[test]
    fn frontiers_only_grow(points in prop::collection::vec((rat(), rat()), 1..12)) {
        let mut fr = Frontier::default();
        for (a, b) in &points {
            let (extra, next) = frontier_update(&fr, a, b);
            prop_assert!(next.contains(&fr));
            let inside = |p: &Rat, lo: &Rat, hi: &Rat| lo <= p && p <= hi;
            prop_assert!(inside(a, &next.lx, &next.ux) && inside(b, &next.ly, &next.uy));
            // every extra point lies on the boundary of the new box
            for (c, d) in &extra {
                let on_x_edge = c == &next.lx || c == &next.ux;
                let on_y_edge = d == &next.ly || d == &next.uy;
                prop_assert!(on_x_edge || on_y_edge, "({}, {}) off the boundary of {}", c, d, next);
            }
            if inside(a, &fr.lx, &fr.ux) && inside(b, &fr.ly, &fr.uy) {
                prop_assert!(extra.is_empty());
                prop_assert_eq!(&next, &fr);
            }
            fr = next;
        }
    }
}
