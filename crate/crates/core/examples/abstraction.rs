//! Replace multiplication by an uninterpreted function and look at the
//! static axioms that come with it.

use nra_cegar::abstraction::{abstract_formula, abstract_system, concretize, AbstractionConfig};
use nra_cegar::smtlib::{parse_smt2_formula, parse_vmt};

const INTRO: &str = include_str!("../corpus/intro.vmt");

fn main() {
    let phi = parse_smt2_formula("(and (>= x 2) (>= y 2) (<= (* x y) 3))").unwrap();
    let cfg = AbstractionConfig::default();
    let abs = abstract_formula(&phi, &cfg);
    println!("input:     {phi}");
    println!("abstract:  {}", abs.abstract_formula);
    println!("fmul terms (closed under the sign axioms):");
    for m in &abs.fmuls {
        println!("  {m}");
    }
    for a in &abs.static_axioms {
        println!("{a}");
    }
    assert_eq!(concretize(&abs.abstract_formula), phi);

    let ts = parse_vmt(INTRO).unwrap();
    let sys = abstract_system(&ts, &cfg);
    println!("\nabstract running example:");
    println!("  init:  {}", sys.system.init);
    println!("  trans: {}", sys.system.trans);
    println!(
        "  {} static axioms over {} applications",
        sys.static_axioms.len(),
        sys.fmuls.len()
    );
}
