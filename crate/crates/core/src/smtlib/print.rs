//! SMT-LIB2 rendering of terms, formulas and scripts.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::terms::{fmuls_of, rat, vars_of, Node, Term, Var};

use super::sexp::quote_symbol;

/// Name of the uninterpreted multiplication symbol on the wire.
pub const FMUL: &str = "fmul";

pub fn var_symbol(v: &Var) -> String {
    quote_symbol(&v.symbol())
}

pub fn term_to_smtlib(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_app(out: &mut String, head: &str, args: &[&Term]) {
    out.push('(');
    out.push_str(head);
    for a in args {
        out.push(' ');
        write_term(out, a);
    }
    out.push(')');
}

fn write_term(out: &mut String, t: &Term) {
    match t.node() {
        Node::Var(v) => out.push_str(&var_symbol(v)),
        Node::Real(r) => out.push_str(&rat::to_smtlib(r)),
        Node::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Node::Add(ts) => write_app(out, "+", &ts.iter().collect::<Vec<_>>()),
        Node::Scale(c, u) => {
            if *c == -rat::int(1) {
                write_app(out, "-", &[u]);
            } else {
                let _ = write!(out, "(* {} ", rat::to_smtlib(c));
                write_term(out, u);
                out.push(')');
            }
        }
        Node::Mul(a, b) => write_app(out, "*", &[a, b]),
        Node::Fmul(a, b) => write_app(out, FMUL, &[a, b]),
        Node::Ite(c, a, b) => write_app(out, "ite", &[c, a, b]),
        Node::Le(a, b) => write_app(out, "<=", &[a, b]),
        Node::Lt(a, b) => write_app(out, "<", &[a, b]),
        Node::Eq(a, b) | Node::Iff(a, b) => write_app(out, "=", &[a, b]),
        Node::Not(a) => write_app(out, "not", &[a]),
        Node::And(ts) => write_app(out, "and", &ts.iter().collect::<Vec<_>>()),
        Node::Or(ts) => write_app(out, "or", &ts.iter().collect::<Vec<_>>()),
        Node::Implies(a, b) => write_app(out, "=>", &[a, b]),
    }
}

/// `(declare-fun v () Sort)` for each variable.
pub fn declarations<'a, I: IntoIterator<Item = &'a Var>>(vars: I) -> String {
    let mut out = String::new();
    for v in vars {
        let _ = writeln!(out, "(declare-fun {} () {})", var_symbol(v), v.sort);
    }
    out
}

pub fn fmul_declaration() -> String {
    format!("(declare-fun {FMUL} (Real Real) Real)\n")
}

/// Self-contained script for a formula: one global `fmul` declaration when
/// needed, declarations for every variable, then a single assertion.
pub fn formula_to_script(f: &Term) -> String {
    let mut out = String::new();
    if !fmuls_of(f).is_empty() {
        out.push_str(&fmul_declaration());
    }
    let vars: BTreeSet<Var> = vars_of(f);
    out.push_str(&declarations(&vars));
    let _ = writeln!(out, "(assert {})", term_to_smtlib(f));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::rat::{int, ratio};

    #[test]
    fn rational_and_negative_constants() {
        assert_eq!(term_to_smtlib(&Term::real(ratio(3, 2))), "(/ 3 2)");
        assert_eq!(term_to_smtlib(&Term::int(-5)), "(- 5)");
    }

    #[test]
    fn fmul_and_scale() {
        let (x, y) = (Term::real_var("x"), Term::real_var("y"));
        let t = Term::add([Term::fmul(y, x.clone()), Term::scale(int(3), x.clone())]);
        let s = term_to_smtlib(&t);
        assert!(s.contains("(fmul x y)"), "{s}");
        assert!(s.contains("(* 3 x)"), "{s}");
        assert_eq!(term_to_smtlib(&Term::neg(x)), "(- x)");
    }

    #[test]
    fn script_declares_fmul_once() {
        let (x, y) = (Term::real_var("x"), Term::real_var("y"));
        let f = Term::and([
            Term::ge(Term::fmul(x.clone(), y.clone()), Term::int(0)),
            Term::le(Term::fmul(x.clone(), x), y),
        ]);
        let s = formula_to_script(&f);
        assert_eq!(s.matches("declare-fun fmul").count(), 1);
        assert!(s.contains("(declare-fun x () Real)"));
    }
}
