//! SMT-LIB2 term elaboration: s-expressions to well-sorted [`Term`]s.

use std::collections::HashMap;

use num::Zero;

use crate::terms::{rat, Rat, Sort, Term, Time, Var};

use super::print::FMUL;
use super::sexp::{self, Pos, Sexp, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: {msg}")]
    At { pos: Pos, msg: String },
    #[error("{0}")]
    Other(String),
}

pub(crate) fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::At { pos, msg: msg.into() })
}

/// User macro from `define-fun`.
#[derive(Clone, Debug)]
pub struct Macro {
    pub params: Vec<Var>,
    pub body: Term,
}

/// Symbol table for elaboration.
#[derive(Clone, Debug, Default)]
pub struct Env {
    symbols: HashMap<String, Var>,
    macros: HashMap<String, Macro>,
    /// Undeclared symbols are accepted and sorted from context.
    pub implicit: bool,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn implicit() -> Env {
        Env {
            implicit: true,
            ..Env::default()
        }
    }

    pub fn declare(&mut self, symbol: &str, var: Var) {
        self.symbols.insert(symbol.to_string(), var);
    }

    pub fn define(&mut self, name: &str, m: Macro) {
        self.macros.insert(name.to_string(), m);
    }

    pub fn lookup(&self, symbol: &str) -> Option<&Var> {
        self.symbols.get(symbol)
    }
}

/// Maps wire symbols back to timed variables: `x'` is the next-state copy
/// of `x`, `x@3` its copy at step 3.
pub fn decode_symbol(symbol: &str, sort: Sort) -> Var {
    if let Some(base) = symbol.strip_suffix('\'') {
        if !base.is_empty() {
            return Var::new(base, sort).with_time(Time::Next);
        }
    }
    if let Some((base, step)) = symbol.rsplit_once('@') {
        if !base.is_empty() && !step.is_empty() && step.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(i) = step.parse::<u32>() {
                return Var::new(base, sort).with_time(Time::At(i));
            }
        }
    }
    Var::new(symbol, sort)
}

pub fn parse_sort(s: &Sexp) -> Result<Sort, ParseError> {
    match s.as_symbol() {
        Some("Real") => Ok(Sort::Real),
        Some("Bool") => Ok(Sort::Bool),
        Some(other) => err(s.pos(), format!("unsupported sort `{other}` (only Real and Bool)")),
        None => err(s.pos(), format!("unsupported sort `{s}`")),
    }
}

pub fn parse_rational_literal(s: &Sexp) -> Option<Rat> {
    match s {
        Sexp::Number(text, _) => rat::parse_decimal(text),
        Sexp::List(items, _) => match (items.first()?.as_symbol()?, items.len()) {
            ("-", 2) => Some(-parse_rational_literal(&items[1])?),
            ("/", 3) => {
                let (p, q) = (parse_rational_literal(&items[1])?, parse_rational_literal(&items[2])?);
                if q.is_zero() {
                    None
                } else {
                    Some(p / q)
                }
            }
            _ => None,
        },
        _ => None,
    }
}

pub struct Elaborator<'e> {
    env: &'e mut Env,
    scopes: Vec<HashMap<String, Term>>,
}

impl<'e> Elaborator<'e> {
    pub fn new(env: &'e mut Env) -> Elaborator<'e> {
        Elaborator {
            env,
            scopes: Vec::new(),
        }
    }

    fn bound(&self, name: &str) -> Option<&Term> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    /// Elaborates `s`, expecting `expected` when known.
    pub fn term(&mut self, s: &Sexp, expected: Option<Sort>) -> Result<Term, ParseError> {
        let t = self.term_inner(s, expected)?;
        if let Some(want) = expected {
            if t.sort() != want {
                return err(s.pos(), format!("expected a {want} term, found {}", t.sort()));
            }
        }
        Ok(t)
    }

    fn real(&mut self, s: &Sexp) -> Result<Term, ParseError> {
        self.term(s, Some(Sort::Real))
    }

    fn boolean(&mut self, s: &Sexp) -> Result<Term, ParseError> {
        self.term(s, Some(Sort::Bool))
    }

    fn symbol(&mut self, name: &str, pos: Pos, expected: Option<Sort>) -> Result<Term, ParseError> {
        match name {
            "true" => return Ok(Term::tt()),
            "false" => return Ok(Term::ff()),
            _ => {}
        }
        if let Some(t) = self.bound(name) {
            return Ok(t.clone());
        }
        if let Some(v) = self.env.lookup(name) {
            return Ok(Term::var(v.clone()));
        }
        if let Some(m) = self.env.macros.get(name) {
            if m.params.is_empty() {
                return Ok(m.body.clone());
            }
            return err(pos, format!("`{name}` expects {} arguments", m.params.len()));
        }
        if self.env.implicit {
            let var = decode_symbol(name, expected.unwrap_or(Sort::Real));
            self.env.declare(name, var.clone());
            return Ok(Term::var(var));
        }
        err(pos, format!("unknown symbol `{name}`"))
    }

    fn term_inner(&mut self, s: &Sexp, expected: Option<Sort>) -> Result<Term, ParseError> {
        match s {
            Sexp::Number(text, pos) => match rat::parse_decimal(text) {
                Some(r) => Ok(Term::real(r)),
                None => err(*pos, format!("malformed number `{text}`")),
            },
            Sexp::Symbol(name, pos) => self.symbol(name, *pos, expected),
            Sexp::Keyword(k, pos) => err(*pos, format!("unexpected keyword `{k}`")),
            Sexp::Str(_, pos) => err(*pos, "unexpected string literal"),
            Sexp::List(items, pos) => self.app(items, *pos, expected),
        }
    }

    fn app(&mut self, items: &[Sexp], pos: Pos, expected: Option<Sort>) -> Result<Term, ParseError> {
        let Some(head) = items.first() else {
            return err(pos, "empty application");
        };
        let Some(op) = head.as_symbol() else {
            return err(head.pos(), format!("unsupported application head `{head}`"));
        };
        let args = &items[1..];
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() == n {
                Ok(())
            } else {
                err(pos, format!("`{op}` expects {n} arguments, got {}", args.len()))
            }
        };
        let at_least = |n: usize| -> Result<(), ParseError> {
            if args.len() >= n {
                Ok(())
            } else {
                err(pos, format!("`{op}` expects at least {n} arguments"))
            }
        };
        match op {
            "let" => {
                arity(2)?;
                let Some(bindings) = args[0].as_list() else {
                    return err(args[0].pos(), "malformed let bindings");
                };
                let mut scope = HashMap::new();
                for b in bindings {
                    match b.as_list() {
                        Some([name, value]) if name.as_symbol().is_some() => {
                            let v = self.term(value, None)?;
                            scope.insert(name.as_symbol().unwrap().to_string(), v);
                        }
                        _ => return err(b.pos(), "malformed let binding"),
                    }
                }
                self.scopes.push(scope);
                let body = self.term(&args[1], expected);
                self.scopes.pop();
                body
            }
            "!" => {
                at_least(1)?;
                self.term(&args[0], expected)
            }
            "+" => {
                at_least(1)?;
                let ts = args.iter().map(|a| self.real(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::add(ts))
            }
            "-" => {
                at_least(1)?;
                let ts = args.iter().map(|a| self.real(a)).collect::<Result<Vec<_>, _>>()?;
                if ts.len() == 1 {
                    return Ok(Term::neg(ts[0].clone()));
                }
                let mut it = ts.into_iter();
                let first = it.next().unwrap();
                Ok(Term::add(
                    std::iter::once(first).chain(it.map(Term::neg)).collect::<Vec<_>>(),
                ))
            }
            "*" => {
                at_least(1)?;
                let ts = args.iter().map(|a| self.real(a)).collect::<Result<Vec<_>, _>>()?;
                let mut coeff = rat::int(1);
                let mut factors = Vec::new();
                for t in ts {
                    match t.as_const() {
                        Some(c) => coeff *= c,
                        None => factors.push(t),
                    }
                }
                let product = factors.into_iter().reduce(Term::mul).unwrap_or_else(|| Term::int(1));
                Ok(Term::scale(coeff, product))
            }
            "/" => {
                at_least(2)?;
                let mut acc = self.real(&args[0])?;
                for a in &args[1..] {
                    let d = self.real(a)?;
                    match d.as_const() {
                        Some(c) if !c.is_zero() => acc = Term::scale(rat::int(1) / c, acc),
                        Some(_) => return err(a.pos(), "division by zero"),
                        None => return err(a.pos(), "division by a non-constant term is not supported"),
                    }
                }
                Ok(acc)
            }
            "to_real" => {
                arity(1)?;
                self.real(&args[0])
            }
            "abs" => {
                arity(1)?;
                let t = self.real(&args[0])?;
                Ok(Term::abs(t))
            }
            FMUL => {
                arity(2)?;
                let (a, b) = (self.real(&args[0])?, self.real(&args[1])?);
                Ok(Term::fmul(a, b))
            }
            "<=" | "<" | ">=" | ">" => {
                at_least(2)?;
                let ts = args.iter().map(|a| self.real(a)).collect::<Result<Vec<_>, _>>()?;
                let f = match op {
                    "<=" => Term::le,
                    "<" => Term::lt,
                    ">=" => Term::ge,
                    _ => Term::gt,
                };
                Ok(Term::and(
                    ts.windows(2).map(|w| f(w[0].clone(), w[1].clone())).collect::<Vec<_>>(),
                ))
            }
            "=" | "distinct" => {
                at_least(2)?;
                let ts = self.same_sort_args(args)?;
                if op == "=" {
                    Ok(Term::and(
                        ts.windows(2)
                            .map(|w| Term::eq(w[0].clone(), w[1].clone()))
                            .collect::<Vec<_>>(),
                    ))
                } else {
                    let mut conj = Vec::new();
                    for i in 0..ts.len() {
                        for j in i + 1..ts.len() {
                            conj.push(Term::distinct(ts[i].clone(), ts[j].clone()));
                        }
                    }
                    Ok(Term::and(conj))
                }
            }
            "not" => {
                arity(1)?;
                Ok(Term::not(self.boolean(&args[0])?))
            }
            "and" | "or" => {
                let ts = args.iter().map(|a| self.boolean(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(if op == "and" { Term::and(ts) } else { Term::or(ts) })
            }
            "=>" => {
                at_least(2)?;
                let ts = args.iter().map(|a| self.boolean(a)).collect::<Result<Vec<_>, _>>()?;
                let mut it = ts.into_iter().rev();
                let last = it.next().unwrap();
                Ok(it.fold(last, |acc, t| Term::implies(t, acc)))
            }
            "xor" => {
                at_least(2)?;
                let ts = args.iter().map(|a| self.boolean(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(ts.into_iter().reduce(|a, b| Term::not(Term::iff(a, b))).unwrap())
            }
            "ite" => {
                arity(3)?;
                let c = self.boolean(&args[0])?;
                let a = self.term(&args[1], expected)?;
                let b = self.term(&args[2], Some(a.sort()))?;
                Ok(Term::ite(c, a, b))
            }
            name => {
                if let Some(m) = self.env.macros.get(name).cloned() {
                    arity(m.params.len())?;
                    let mut map = std::collections::BTreeMap::new();
                    for (p, a) in m.params.iter().zip(args) {
                        let t = self.term(a, Some(p.sort))?;
                        map.insert(p.clone(), t);
                    }
                    return crate::terms::substitute(&m.body, &map).map_err(|e| ParseError::At {
                        pos,
                        msg: e.to_string(),
                    });
                }
                err(head.pos(), format!("unsupported operator `{name}`"))
            }
        }
    }

    /// Elaborates arguments of `=`/`distinct`, sorting implicit symbols from
    /// their siblings.
    fn same_sort_args(&mut self, args: &[Sexp]) -> Result<Vec<Term>, ParseError> {
        let mut sort = None;
        for a in args {
            if let Some(s) = self.known_sort(a) {
                sort = Some(s);
                break;
            }
        }
        let sort = sort.unwrap_or(Sort::Real);
        args.iter().map(|a| self.term(a, Some(sort))).collect()
    }

    fn known_sort(&self, s: &Sexp) -> Option<Sort> {
        match s {
            Sexp::Number(..) => Some(Sort::Real),
            Sexp::Symbol(name, _) => match name.as_str() {
                "true" | "false" => Some(Sort::Bool),
                _ => self
                    .bound(name)
                    .map(|t| t.sort())
                    .or_else(|| self.env.lookup(name).map(|v| v.sort))
                    .or_else(|| self.env.macros.get(name).map(|m| m.body.sort())),
            },
            Sexp::List(items, _) => match items.first()?.as_symbol()? {
                "+" | "-" | "*" | "/" | FMUL | "to_real" | "abs" => Some(Sort::Real),
                "<=" | "<" | ">=" | ">" | "=" | "distinct" | "not" | "and" | "or" | "=>" | "xor" => Some(Sort::Bool),
                "ite" => items.get(2).and_then(|a| self.known_sort(a)),
                "!" => items.get(1).and_then(|a| self.known_sort(a)),
                name => self.env.macros.get(name).map(|m| m.body.sort()),
            },
            _ => None,
        }
    }
}

/// Parses an SMT-LIB2 formula. Accepts either a bare boolean term (with
/// undeclared symbols sorted from context) or a script of declarations,
/// definitions and assertions, whose assertions are conjoined.
pub fn parse_smt2_formula(text: &str) -> Result<Term, ParseError> {
    let exprs = sexp::parse_all(text)?;
    let is_script = exprs.iter().any(|e| {
        matches!(
            e.head(),
            Some("assert" | "declare-fun" | "declare-const" | "define-fun" | "set-logic")
        )
    });
    if is_script {
        return Ok(super::script::parse_script_sexps(&exprs)?.formula());
    }
    match exprs.as_slice() {
        [one] => {
            let mut env = Env::implicit();
            Elaborator::new(&mut env).term(one, Some(Sort::Bool))
        }
        [] => Err(ParseError::Other("empty input".into())),
        [_, second, ..] => err(second.pos(), "expected a single formula"),
    }
}
