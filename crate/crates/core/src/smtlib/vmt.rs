//! The VMT transition-system format: SMT-LIB2 with `:next`, `:init`,
//! `:trans` and `:invar-property` annotations on `define-fun` bodies.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::terms::{fmuls_of, Sort, Term, Var};

use super::parse::{err, Elaborator, Env, ParseError};
use super::print::{fmul_declaration, term_to_smtlib};
use super::script::{declaration, definition, elaborate_macro, is_ignored};
use super::sexp::{self, quote_symbol, Sexp};
use super::system::{Property, StateVar, TransitionSystem};

type Annotated<'a> = (&'a Sexp, Vec<(&'a str, Option<&'a Sexp>)>);

/// Annotations attached with `(! e :key value ...)`.
fn annotations(body: &Sexp) -> Option<Annotated<'_>> {
    let items = body.as_list()?;
    if items.first()?.as_symbol()? != "!" || items.len() < 2 {
        return None;
    }
    let mut attrs = Vec::new();
    let mut i = 2;
    while i < items.len() {
        if let Sexp::Keyword(k, _) = &items[i] {
            let value = items.get(i + 1).filter(|v| !matches!(v, Sexp::Keyword(..)));
            attrs.push((k.as_str(), value));
            i += if value.is_some() { 2 } else { 1 };
        } else {
            i += 1;
        }
    }
    Some((&items[1], attrs))
}

pub fn parse_vmt(text: &str) -> Result<TransitionSystem, ParseError> {
    let exprs = sexp::parse_all(text)?;

    // Pass 1: declarations and :next pairings.
    let mut declared: Vec<(String, Sort, sexp::Pos)> = Vec::new();
    let mut next_of: HashMap<String, String> = HashMap::new();
    let mut is_next: HashMap<String, String> = HashMap::new();
    for cmd in &exprs {
        let Some(head) = cmd.head() else {
            return err(cmd.pos(), "expected a command");
        };
        match head {
            "declare-fun" | "declare-const" => {
                if let Some((name, sort)) = declaration(cmd)? {
                    declared.push((name, sort, cmd.pos()));
                }
            }
            "define-fun" => {
                let (_, _, _, body) = definition(cmd)?;
                if let Some((inner, attrs)) = annotations(body) {
                    for (k, v) in attrs {
                        if k != ":next" {
                            continue;
                        }
                        let (Some(cur), Some(nxt)) = (inner.as_symbol(), v.and_then(Sexp::as_symbol)) else {
                            return err(body.pos(), ":next must pair two declared symbols");
                        };
                        if next_of.contains_key(cur) || is_next.contains_key(nxt) {
                            return err(body.pos(), format!("`{cur}` is paired more than once"));
                        }
                        next_of.insert(cur.to_string(), nxt.to_string());
                        is_next.insert(nxt.to_string(), cur.to_string());
                    }
                }
            }
            _ => {}
        }
    }

    let sorts: HashMap<&str, Sort> = declared.iter().map(|(n, s, _)| (n.as_str(), *s)).collect();
    let mut env = Env::new();
    let mut vars = Vec::new();
    for (name, sort, pos) in &declared {
        if let Some(nxt) = next_of.get(name) {
            match sorts.get(nxt.as_str()) {
                Some(s) if s == sort => {}
                Some(_) => return err(*pos, format!("`{name}` and `{nxt}` have different sorts")),
                None => return err(*pos, format!("next-state symbol `{nxt}` is not declared")),
            }
            let v = Var::new(name, *sort);
            env.declare(name, v.clone());
            env.declare(nxt, v.next());
            vars.push(StateVar {
                var: v,
                next_symbol: nxt.clone(),
            });
        } else if !is_next.contains_key(name) {
            return err(*pos, format!("`{name}` is not a state variable (no :next pairing)"));
        }
    }

    // Pass 2: definitions in order.
    let mut init = Vec::new();
    let mut trans = Vec::new();
    let mut props: BTreeMap<u32, Term> = BTreeMap::new();
    for cmd in &exprs {
        let head = cmd.head().unwrap();
        match head {
            "declare-fun" | "declare-const" => {}
            "define-fun" => {
                let (name, params, sort, body) = definition(cmd)?;
                let m = elaborate_macro(&mut env, &params, sort, body)?;
                if let Some((_, attrs)) = annotations(body) {
                    for (k, v) in attrs {
                        let flag = v.and_then(Sexp::as_symbol) == Some("true");
                        match k {
                            ":next" => {}
                            ":init" if flag => init.push(m.body.clone()),
                            ":trans" if flag => trans.push(m.body.clone()),
                            ":invar-property" => {
                                let idx = match v {
                                    Some(Sexp::Number(n, _)) => n.parse::<u32>().ok(),
                                    _ => None,
                                };
                                let Some(idx) = idx else {
                                    return err(body.pos(), ":invar-property needs an integer index");
                                };
                                if props.insert(idx, m.body.clone()).is_some() {
                                    return err(body.pos(), format!("property index {idx} defined twice"));
                                }
                            }
                            ":live-property" => {
                                return err(body.pos(), "liveness properties are not supported");
                            }
                            _ => {}
                        }
                    }
                }
                env.define(name, m);
            }
            "assert" => {
                return err(cmd.pos(), "VMT files must not contain assertions");
            }
            h if is_ignored(h) => {}
            other => return err(cmd.pos(), format!("unsupported command `{other}`")),
        }
    }
    if init.is_empty() {
        return Err(ParseError::Other("no initial-state formula (missing :init)".into()));
    }
    if trans.is_empty() {
        return Err(ParseError::Other("no transition relation (missing :trans)".into()));
    }
    let ts = TransitionSystem {
        vars,
        init: Term::and(init),
        trans: Term::and(trans),
        properties: props
            .into_iter()
            .map(|(index, formula)| Property { index, formula })
            .collect(),
    };
    ts.validate().map_err(|e| ParseError::Other(e.to_string()))?;
    Ok(ts)
}

/// Renders a system as VMT. Next-state copies print as their VMT symbols.
pub fn serialize_vmt(ts: &TransitionSystem) -> String {
    let rename: HashMap<Var, String> = ts.vars.iter().map(|s| (s.var.next(), s.next_symbol.clone())).collect();
    let render = |t: &Term| -> String {
        let t = t.map_bottom_up(&mut |u| {
            let v = u.as_var()?;
            let sym = rename.get(v)?;
            // a current-state variable named after the VMT symbol prints identically
            Some(Term::var(Var::new(sym, v.sort)))
        });
        term_to_smtlib(&t)
    };
    let mut out = String::new();
    let mut uses_fmul = !fmuls_of(&ts.init).is_empty() || !fmuls_of(&ts.trans).is_empty();
    uses_fmul |= ts.properties.iter().any(|p| !fmuls_of(&p.formula).is_empty());
    if uses_fmul {
        out.push_str(&fmul_declaration());
    }
    for (i, s) in ts.vars.iter().enumerate() {
        let cur = quote_symbol(&s.var.symbol());
        let nxt = quote_symbol(&s.next_symbol);
        let _ = writeln!(out, "(declare-fun {cur} () {})", s.var.sort);
        let _ = writeln!(out, "(declare-fun {nxt} () {})", s.var.sort);
        let _ = writeln!(out, "(define-fun .sv{i} () {} (! {cur} :next {nxt}))", s.var.sort);
    }
    let _ = writeln!(out, "(define-fun .init () Bool (! {} :init true))", render(&ts.init));
    let _ = writeln!(out, "(define-fun .trans () Bool (! {} :trans true))", render(&ts.trans));
    for p in &ts.properties {
        let _ = writeln!(
            out,
            "(define-fun .prop{} () Bool (! {} :invar-property {}))",
            p.index,
            render(&p.formula),
            p.index
        );
    }
    out
}

/// Parses a standalone formula over the variables of `ts` (current and
/// next-state copies by their VMT symbols).
pub fn parse_formula_over(ts: &TransitionSystem, text: &str) -> Result<Term, ParseError> {
    let mut env = Env::new();
    for s in &ts.vars {
        env.declare(&s.var.symbol(), s.var.clone());
        env.declare(&s.next_symbol, s.var.next());
    }
    let e = sexp::parse_one(text)?;
    Elaborator::new(&mut env).term(&e, Some(Sort::Bool))
}
