//! Immutable, structurally compared terms over reals and booleans.
//!
//! All construction goes through the smart constructors on [`Term`], which
//! keep terms in a canonical shape:
//!
//! - linear parts are flattened into a single `Add` of distinct monomials,
//!   each optionally wrapped in a `Scale`, with at most one constant;
//! - `Scale` never wraps a constant, another `Scale` or an `Add`;
//! - `Mul` only ever has two non-constant factors (a constant factor turns
//!   the product into a `Scale`);
//! - `Mul` and `Fmul` store their arguments in ascending term order, so the
//!   commutativity of multiplication is structural;
//! - `And`/`Or` are flattened, sorted and deduplicated, and constant
//!   subterms are folded away everywhere.

use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};

use super::rat::{self, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Real,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Real => f.write_str("Real"),
            Sort::Bool => f.write_str("Bool"),
        }
    }
}

/// Which copy of a state variable a symbol denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Time {
    /// `x`, the current-state copy.
    Current,
    /// `x'`, the next-state copy.
    Next,
    /// `x^i`, the copy at step `i` of an unrolling.
    At(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub time: Time,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Var {
        Var {
            name: Arc::from(name),
            time: Time::Current,
            sort,
        }
    }

    pub fn with_time(&self, time: Time) -> Var {
        Var {
            name: self.name.clone(),
            time,
            sort: self.sort,
        }
    }

    pub fn next(&self) -> Var {
        self.with_time(Time::Next)
    }

    pub fn at(&self, step: u32) -> Var {
        self.with_time(Time::At(step))
    }

    /// Symbol used on the SMT-LIB wire: `x`, `x'`, `x@3`.
    pub fn symbol(&self) -> String {
        match self.time {
            Time::Current => self.name.to_string(),
            Time::Next => format!("{}'", self.name),
            Time::At(i) => format!("{}@{}", self.name, i),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol())
    }
}

/// Term node. Variant order matters: it is the primary key of the term order
/// used to canonicalize multiplication arguments, so variables sort first and
/// compare by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var(Var),
    Real(Rat),
    Bool(bool),
    Add(Vec<Term>),
    Scale(Rat, Term),
    Mul(Term, Term),
    Fmul(Term, Term),
    Ite(Term, Term, Term),
    Le(Term, Term),
    Lt(Term, Term),
    Eq(Term, Term),
    Not(Term),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Term, Term),
    Iff(Term, Term),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(Arc<Node>);

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::smtlib::print::term_to_smtlib(self))
    }
}

fn mk(node: Node) -> Term {
    Term(Arc::new(node))
}

// `Term::mul(a, b)` and friends are smart constructors, not operators on self.
#[allow(clippy::should_implement_trait)]
impl Term {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn sort(&self) -> Sort {
        match self.node() {
            Node::Var(v) => v.sort,
            Node::Real(_) | Node::Add(_) | Node::Scale(..) | Node::Mul(..) | Node::Fmul(..) => Sort::Real,
            Node::Ite(_, a, _) => a.sort(),
            _ => Sort::Bool,
        }
    }

    pub fn is_real(&self) -> bool {
        self.sort() == Sort::Real
    }

    pub fn is_bool(&self) -> bool {
        self.sort() == Sort::Bool
    }

    pub fn as_const(&self) -> Option<&Rat> {
        match self.node() {
            Node::Real(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_bool_const(&self) -> Option<bool> {
        match self.node() {
            Node::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self.node() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.as_bool_const() == Some(true)
    }

    pub fn is_false(&self) -> bool {
        self.as_bool_const() == Some(false)
    }

    /// Arguments of an `fmul` application.
    pub fn fmul_args(&self) -> Option<(&Term, &Term)> {
        match self.node() {
            Node::Fmul(a, b) => Some((a, b)),
            _ => None,
        }
    }

    // ---- leaves ----

    pub fn var(v: Var) -> Term {
        mk(Node::Var(v))
    }

    pub fn real_var(name: &str) -> Term {
        Term::var(Var::new(name, Sort::Real))
    }

    pub fn bool_var(name: &str) -> Term {
        Term::var(Var::new(name, Sort::Bool))
    }

    pub fn real(r: Rat) -> Term {
        mk(Node::Real(r))
    }

    pub fn int(n: i64) -> Term {
        Term::real(rat::int(n))
    }

    pub fn boolean(b: bool) -> Term {
        mk(Node::Bool(b))
    }

    pub fn tt() -> Term {
        Term::boolean(true)
    }

    pub fn ff() -> Term {
        Term::boolean(false)
    }

    // ---- arithmetic ----

    /// Sum in linear normal form: like monomials are merged, zero
    /// coefficients dropped, constants folded.
    pub fn add<I: IntoIterator<Item = Term>>(items: I) -> Term {
        let mut monomials: Vec<(Term, Rat)> = Vec::new();
        let mut constant = Rat::zero();
        for t in items {
            collect_linear(&t, &Rat::one(), &mut monomials, &mut constant);
        }
        monomials.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Term, Rat)> = Vec::with_capacity(monomials.len());
        for (t, c) in monomials {
            match merged.last_mut() {
                Some((last, acc)) if *last == t => *acc += c,
                _ => merged.push((t, c)),
            }
        }
        let mut children: Vec<Term> = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| scale_monomial(c, t))
            .collect();
        if !constant.is_zero() {
            children.push(Term::real(constant.clone()));
        }
        match children.len() {
            0 => Term::real(constant),
            1 => children.pop().unwrap(),
            _ => mk(Node::Add(children)),
        }
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::add([a, Term::neg(b)])
    }

    pub fn neg(a: Term) -> Term {
        Term::scale(-Rat::one(), a)
    }

    pub fn scale(c: Rat, t: Term) -> Term {
        assert!(t.is_real(), "scale of a non-real term");
        if c.is_zero() {
            return Term::int(0);
        }
        if c.is_one() {
            return t;
        }
        match t.node() {
            Node::Real(r) => Term::real(c * r),
            Node::Scale(d, u) => Term::scale(c * d, u.clone()),
            Node::Add(_) => t.clone().scaled_sum(&c),
            _ => mk(Node::Scale(c, t)),
        }
    }

    fn scaled_sum(self, c: &Rat) -> Term {
        let mut monomials = Vec::new();
        let mut constant = Rat::zero();
        collect_linear(&self, c, &mut monomials, &mut constant);
        let mut items: Vec<Term> = monomials.into_iter().map(|(t, k)| scale_monomial(k, t)).collect();
        items.push(Term::real(constant));
        Term::add(items)
    }

    /// Product. A constant factor yields a `scale`; two non-constant factors
    /// yield a canonically ordered `mul`.
    pub fn mul(a: Term, b: Term) -> Term {
        assert!(a.is_real() && b.is_real(), "mul of non-real terms");
        if let Some(c) = a.as_const() {
            return Term::scale(c.clone(), b);
        }
        if let Some(c) = b.as_const() {
            return Term::scale(c.clone(), a);
        }
        let (a, b) = ordered(a, b);
        mk(Node::Mul(a, b))
    }

    /// Uninterpreted multiplication. Arguments are ordered but never folded,
    /// so `fmul(2, y)` stays an application.
    pub fn fmul(a: Term, b: Term) -> Term {
        assert!(a.is_real() && b.is_real(), "fmul of non-real terms");
        let (a, b) = ordered(a, b);
        mk(Node::Fmul(a, b))
    }

    pub fn ite(c: Term, a: Term, b: Term) -> Term {
        assert!(c.is_bool(), "ite condition must be boolean");
        assert_eq!(a.sort(), b.sort(), "ite branches must agree on sort");
        match c.as_bool_const() {
            Some(true) => return a,
            Some(false) => return b,
            None => {}
        }
        if a == b {
            return a;
        }
        if let Node::Not(inner) = c.node() {
            return Term::ite(inner.clone(), b, a);
        }
        mk(Node::Ite(c, a, b))
    }

    /// `ite(t < 0, -t, t)`.
    pub fn abs(t: Term) -> Term {
        if let Some(c) = t.as_const() {
            return Term::real(c.abs());
        }
        Term::ite(Term::lt(t.clone(), Term::int(0)), Term::neg(t.clone()), t)
    }

    // ---- atoms ----

    pub fn le(a: Term, b: Term) -> Term {
        assert!(a.is_real() && b.is_real(), "<= over non-real terms");
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Term::boolean(x <= y);
        }
        if a == b {
            return Term::tt();
        }
        mk(Node::Le(a, b))
    }

    pub fn lt(a: Term, b: Term) -> Term {
        assert!(a.is_real() && b.is_real(), "< over non-real terms");
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Term::boolean(x < y);
        }
        if a == b {
            return Term::ff();
        }
        mk(Node::Lt(a, b))
    }

    pub fn ge(a: Term, b: Term) -> Term {
        Term::le(b, a)
    }

    pub fn gt(a: Term, b: Term) -> Term {
        Term::lt(b, a)
    }

    /// Equality; over booleans this is `iff`.
    pub fn eq(a: Term, b: Term) -> Term {
        assert_eq!(a.sort(), b.sort(), "= over terms of different sorts");
        if a.is_bool() {
            return Term::iff(a, b);
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Term::boolean(x == y);
        }
        if a == b {
            return Term::tt();
        }
        let (a, b) = ordered(a, b);
        mk(Node::Eq(a, b))
    }

    pub fn distinct(a: Term, b: Term) -> Term {
        Term::not(Term::eq(a, b))
    }

    // ---- connectives ----

    pub fn not(a: Term) -> Term {
        assert!(a.is_bool(), "not of a non-boolean term");
        match a.node() {
            Node::Bool(b) => Term::boolean(!b),
            Node::Not(inner) => inner.clone(),
            _ => mk(Node::Not(a)),
        }
    }

    pub fn and<I: IntoIterator<Item = Term>>(items: I) -> Term {
        junction(items, true)
    }

    pub fn or<I: IntoIterator<Item = Term>>(items: I) -> Term {
        junction(items, false)
    }

    pub fn and2(a: Term, b: Term) -> Term {
        Term::and([a, b])
    }

    pub fn or2(a: Term, b: Term) -> Term {
        Term::or([a, b])
    }

    pub fn implies(a: Term, b: Term) -> Term {
        assert!(a.is_bool() && b.is_bool(), "=> over non-boolean terms");
        match (a.as_bool_const(), b.as_bool_const()) {
            (Some(true), _) => b,
            (Some(false), _) | (_, Some(true)) => Term::tt(),
            (_, Some(false)) => Term::not(a),
            _ if a == b => Term::tt(),
            _ => mk(Node::Implies(a, b)),
        }
    }

    pub fn iff(a: Term, b: Term) -> Term {
        assert!(a.is_bool() && b.is_bool(), "iff over non-boolean terms");
        match (a.as_bool_const(), b.as_bool_const()) {
            (Some(x), _) => {
                if x {
                    b
                } else {
                    Term::not(b)
                }
            }
            (_, Some(y)) => {
                if y {
                    a
                } else {
                    Term::not(a)
                }
            }
            _ if a == b => Term::tt(),
            _ => {
                let (a, b) = ordered(a, b);
                mk(Node::Iff(a, b))
            }
        }
    }

    /// Children in left-to-right order.
    pub fn children(&self) -> Vec<&Term> {
        match self.node() {
            Node::Var(_) | Node::Real(_) | Node::Bool(_) => vec![],
            Node::Add(ts) | Node::And(ts) | Node::Or(ts) => ts.iter().collect(),
            Node::Scale(_, t) | Node::Not(t) => vec![t],
            Node::Mul(a, b)
            | Node::Fmul(a, b)
            | Node::Le(a, b)
            | Node::Lt(a, b)
            | Node::Eq(a, b)
            | Node::Implies(a, b)
            | Node::Iff(a, b) => vec![a, b],
            Node::Ite(c, a, b) => vec![c, a, b],
        }
    }

    /// Rebuilds this node with new children through the smart constructors.
    pub fn rebuild(&self, kids: Vec<Term>) -> Term {
        let mut it = kids.into_iter();
        let mut next = || it.next().expect("rebuild: missing child");
        match self.node() {
            Node::Var(_) | Node::Real(_) | Node::Bool(_) => self.clone(),
            Node::Add(ts) => Term::add((0..ts.len()).map(|_| next()).collect::<Vec<_>>()),
            Node::And(ts) => Term::and((0..ts.len()).map(|_| next()).collect::<Vec<_>>()),
            Node::Or(ts) => Term::or((0..ts.len()).map(|_| next()).collect::<Vec<_>>()),
            Node::Scale(c, _) => Term::scale(c.clone(), next()),
            Node::Not(_) => Term::not(next()),
            Node::Mul(..) => {
                let a = next();
                Term::mul(a, next())
            }
            Node::Fmul(..) => {
                let a = next();
                Term::fmul(a, next())
            }
            Node::Le(..) => {
                let a = next();
                Term::le(a, next())
            }
            Node::Lt(..) => {
                let a = next();
                Term::lt(a, next())
            }
            Node::Eq(..) => {
                let a = next();
                Term::eq(a, next())
            }
            Node::Implies(..) => {
                let a = next();
                Term::implies(a, next())
            }
            Node::Iff(..) => {
                let a = next();
                Term::iff(a, next())
            }
            Node::Ite(..) => {
                let c = next();
                let a = next();
                Term::ite(c, a, next())
            }
        }
    }

    /// Bottom-up rewrite: `f` sees each node after its children were
    /// rewritten and may replace it. Shared subterms are rewritten once.
    pub fn map_bottom_up<F>(&self, f: &mut F) -> Term
    where
        F: FnMut(&Term) -> Option<Term>,
    {
        let mut cache = std::collections::HashMap::new();
        self.map_cached(f, &mut cache)
    }

    fn map_cached<F>(&self, f: &mut F, cache: &mut std::collections::HashMap<Term, Term>) -> Term
    where
        F: FnMut(&Term) -> Option<Term>,
    {
        if let Some(done) = cache.get(self) {
            return done.clone();
        }
        let kids: Vec<Term> = self.children().into_iter().map(|k| k.map_cached(f, cache)).collect();
        let same = kids.iter().zip(self.children()).all(|(a, b)| a == b);
        let rebuilt = if same { self.clone() } else { self.rebuild(kids) };
        let out = f(&rebuilt).unwrap_or(rebuilt);
        cache.insert(self.clone(), out.clone());
        out
    }

    /// Pre-order visit of every distinct subterm.
    pub fn visit<F: FnMut(&Term)>(&self, f: &mut F) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(t) = stack.pop() {
            if !seen.insert(t.clone()) {
                continue;
            }
            f(&t);
            for k in t.children().into_iter().rev() {
                stack.push(k.clone());
            }
        }
    }

    /// Number of distinct subterms.
    pub fn dag_size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn ordered(a: Term, b: Term) -> (Term, Term) {
    if b < a {
        (b, a)
    } else {
        (a, b)
    }
}

fn scale_monomial(c: Rat, t: Term) -> Term {
    if c.is_one() {
        t
    } else {
        mk(Node::Scale(c, t))
    }
}

fn collect_linear(t: &Term, coeff: &Rat, out: &mut Vec<(Term, Rat)>, constant: &mut Rat) {
    assert!(t.is_real(), "sum of a non-real term");
    match t.node() {
        Node::Real(r) => *constant += coeff * r,
        Node::Scale(c, u) => collect_linear(u, &(coeff * c), out, constant),
        Node::Add(ts) => {
            for u in ts {
                collect_linear(u, coeff, out, constant);
            }
        }
        _ => out.push((t.clone(), coeff.clone())),
    }
}

fn junction<I: IntoIterator<Item = Term>>(items: I, is_and: bool) -> Term {
    let mut flat: Vec<Term> = Vec::new();
    let mut stack: Vec<Term> = items.into_iter().collect();
    stack.reverse();
    while let Some(t) = stack.pop() {
        assert!(t.is_bool(), "connective over a non-boolean term");
        match (t.node(), is_and) {
            (Node::Bool(b), _) => {
                if *b != is_and {
                    return Term::boolean(!is_and);
                }
            }
            (Node::And(ts), true) | (Node::Or(ts), false) => {
                for u in ts.iter().rev() {
                    stack.push(u.clone());
                }
            }
            _ => flat.push(t),
        }
    }
    flat.sort();
    flat.dedup();
    match flat.len() {
        0 => Term::boolean(is_and),
        1 => flat.pop().unwrap(),
        _ if is_and => mk(Node::And(flat)),
        _ => mk(Node::Or(flat)),
    }
}
