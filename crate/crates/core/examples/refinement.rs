//! Block a spurious abstract model with tangent and monotonicity lemmas,
//! and watch the frontier of one application grow.

use std::collections::BTreeSet;

use nra_cegar::refinement::{blocks, frontier_update, refine, tangent_lemma, Frontier, Frontiers, RefineConfig};
use nra_cegar::terms::rat::{int, ratio};
use nra_cegar::terms::{Model, Sort, Term, Var};

fn main() {
    let x = Term::real_var("x");
    let y = Term::real_var("y");
    let m = Term::fmul(x.clone(), y.clone());

    // x = 2, y = 3 but fmul(x, y) = 1: the abstraction allows it, NRA does not
    let mut model = Model::new();
    model.set_real(Var::new("x", Sort::Real), int(2));
    model.set_real(Var::new("y", Sort::Real), int(3));
    model.set_fmul(m.clone(), int(1));

    println!("tangent lemma at (2, 3):\n  {}", tangent_lemma(&m, &int(2), &int(3)));

    let mut frontiers = Frontiers::new();
    let lemmas = refine(
        &model,
        &BTreeSet::from([m.clone()]),
        &mut frontiers,
        &RefineConfig::default(),
    )
    .unwrap();
    println!("\nrefine() emits {} lemmas:", lemmas.len());
    for l in &lemmas {
        println!("  {l}");
    }
    assert!(blocks(&model, &lemmas), "some lemma is false in the spurious model");
    println!("the spurious model violates at least one of them");

    let mut fr = Frontier::default();
    for (a, b) in [
        (int(2), int(3)),
        (int(5), int(7)),
        (ratio(-1, 2), int(-4)),
        (int(3), int(-9)),
    ] {
        let (points, next) = frontier_update(&fr, &a, &b);
        println!("\nvisit ({a}, {b}) with frontier {fr}");
        let shown: Vec<String> = points.iter().map(|(a, b)| format!("({a}, {b})")).collect();
        println!("  extra points: {}", shown.join(" "));
        println!("  new frontier: {next}");
        fr = next;
    }
}
