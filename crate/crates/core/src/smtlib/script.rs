//! SMT-LIB2 scripts: declarations, definitions and assertions.

use crate::terms::{Term, Var};

use super::parse::{decode_symbol, err, parse_sort, Elaborator, Env, Macro, ParseError};
use super::print::FMUL;
use super::sexp::{self, Sexp};

/// A parsed `.smt2` problem.
#[derive(Clone, Debug, Default)]
pub struct Script {
    pub declared: Vec<Var>,
    pub assertions: Vec<Term>,
}

impl Script {
    /// Conjunction of all assertions.
    pub fn formula(&self) -> Term {
        Term::and(self.assertions.clone())
    }
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    parse_script_sexps(&sexp::parse_all(text)?)
}

/// `(declare-fun name () Sort)` / `(declare-const name Sort)`; returns the
/// symbol and its sort, or `None` for the `fmul` declaration itself.
pub(crate) fn declaration(cmd: &Sexp) -> Result<Option<(String, crate::terms::Sort)>, ParseError> {
    let items = cmd.as_list().unwrap();
    let head = cmd.head().unwrap();
    let (name, sort) = match (head, items.len()) {
        ("declare-const", 3) => (&items[1], &items[2]),
        ("declare-fun", 4) => {
            let params = items[2].as_list().unwrap_or(&[]);
            if !params.is_empty() {
                if items[1].as_symbol() == Some(FMUL) {
                    return Ok(None);
                }
                return err(cmd.pos(), "only 0-ary declare-fun is supported");
            }
            (&items[1], &items[3])
        }
        _ => return err(cmd.pos(), format!("malformed `{head}`")),
    };
    let Some(name) = name.as_symbol() else {
        return err(name.pos(), "expected a symbol");
    };
    Ok(Some((name.to_string(), parse_sort(sort)?)))
}

/// Name, parameters, result sort and body of a `define-fun`.
pub(crate) type Definition<'a> = (&'a str, Vec<(String, crate::terms::Sort)>, crate::terms::Sort, &'a Sexp);

/// `(define-fun name ((p S) ...) S body)` split into its parts.
pub(crate) fn definition(cmd: &Sexp) -> Result<Definition<'_>, ParseError> {
    let items = cmd.as_list().unwrap();
    if items.len() != 5 {
        return err(cmd.pos(), "malformed define-fun");
    }
    let Some(name) = items[1].as_symbol() else {
        return err(items[1].pos(), "expected a symbol");
    };
    let Some(params) = items[2].as_list() else {
        return err(items[2].pos(), "malformed parameter list");
    };
    let mut ps = Vec::new();
    for p in params {
        match p.as_list() {
            Some([n, s]) if n.as_symbol().is_some() => ps.push((n.as_symbol().unwrap().to_string(), parse_sort(s)?)),
            _ => return err(p.pos(), "malformed parameter"),
        }
    }
    Ok((name, ps, parse_sort(&items[3])?, &items[4]))
}

/// Elaborates a macro body with its parameters in scope.
pub(crate) fn elaborate_macro(
    env: &mut Env,
    params: &[(String, crate::terms::Sort)],
    sort: crate::terms::Sort,
    body: &Sexp,
) -> Result<Macro, ParseError> {
    let mut local = env.clone();
    let mut vars = Vec::new();
    for (i, (n, s)) in params.iter().enumerate() {
        let v = Var::new(&format!("%param{i}%{n}"), *s);
        local.declare(n, v.clone());
        vars.push(v);
    }
    let body = Elaborator::new(&mut local).term(body, Some(sort))?;
    Ok(Macro { params: vars, body })
}

pub(crate) fn is_ignored(head: &str) -> bool {
    matches!(
        head,
        "set-logic" | "set-info" | "set-option" | "check-sat" | "exit" | "get-model" | "get-value" | "push" | "pop"
    )
}

pub(crate) fn parse_script_sexps(exprs: &[Sexp]) -> Result<Script, ParseError> {
    let mut env = Env::new();
    let mut script = Script::default();
    for cmd in exprs {
        let Some(head) = cmd.head() else {
            return err(cmd.pos(), "expected a command");
        };
        match head {
            "declare-fun" | "declare-const" => {
                if let Some((name, sort)) = declaration(cmd)? {
                    let v = decode_symbol(&name, sort);
                    env.declare(&name, v.clone());
                    script.declared.push(v);
                }
            }
            "define-fun" => {
                let (name, params, sort, body) = definition(cmd)?;
                let m = elaborate_macro(&mut env, &params, sort, body)?;
                env.define(name, m);
            }
            "assert" => {
                let items = cmd.as_list().unwrap();
                if items.len() != 2 {
                    return err(cmd.pos(), "malformed assert");
                }
                let t = Elaborator::new(&mut env).term(&items[1], Some(crate::terms::Sort::Bool))?;
                script.assertions.push(t);
            }
            h if is_ignored(h) => {}
            other => return err(cmd.pos(), format!("unsupported command `{other}`")),
        }
    }
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asserts_are_conjoined() {
        let s = parse_script(
            "(set-logic QF_NRA)\n(declare-fun x () Real)\n(declare-const p Bool)\n\
             (define-fun sq ((a Real)) Real (* a a))\n\
             (assert (= (sq x) 2))\n(assert p)\n(check-sat)\n",
        )
        .unwrap();
        assert_eq!(s.declared.len(), 2);
        let x = Term::real_var("x");
        assert_eq!(
            s.formula(),
            Term::and([Term::eq(Term::mul(x.clone(), x), Term::int(2)), Term::bool_var("p")])
        );
    }

    #[test]
    fn undeclared_symbols_rejected() {
        let e = parse_script("(assert (> x 0))").unwrap_err();
        assert!(e.to_string().contains("unknown symbol `x`"), "{e}");
    }

    #[test]
    fn int_sort_rejected() {
        let e = parse_script("(declare-fun n () Int)").unwrap_err();
        assert!(e.to_string().contains("Int"), "{e}");
    }
}
