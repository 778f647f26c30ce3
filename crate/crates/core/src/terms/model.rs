//! Exact models and term evaluation.

use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use super::rat::{self, Rat};
use super::term::{Node, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Real(Rat),
    Bool(bool),
}

impl Value {
    pub fn as_real(&self) -> Option<&Rat> {
        match self {
            Value::Real(r) => Some(r),
            Value::Bool(_) => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Real(_) => None,
        }
    }

    /// The value as a constant term.
    pub fn to_term(&self) -> Term {
        match self {
            Value::Real(r) => Term::real(r.clone()),
            Value::Bool(b) => Term::boolean(*b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(r) => f.write_str(&rat::to_plain(r)),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unassigned symbol `{0}`")]
    Unassigned(String),
}

/// How `fmul` applications are interpreted during evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FmulMode {
    /// Look the application up in the model (uninterpreted semantics).
    Lookup,
    /// Interpret `fmul` as real multiplication.
    Product,
}

/// Exact assignment to variables and to `fmul` application terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    vars: BTreeMap<Var, Value>,
    fmuls: BTreeMap<Term, Rat>,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn set(&mut self, v: Var, value: Value) {
        self.vars.insert(v, value);
    }

    pub fn set_real(&mut self, v: Var, r: Rat) {
        self.vars.insert(v, Value::Real(r));
    }

    pub fn set_fmul(&mut self, t: Term, r: Rat) {
        debug_assert!(t.fmul_args().is_some());
        self.fmuls.insert(t, r);
    }

    pub fn get(&self, v: &Var) -> Option<&Value> {
        self.vars.get(v)
    }

    pub fn get_fmul(&self, t: &Term) -> Option<&Rat> {
        self.fmuls.get(t)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&Var, &Value)> {
        self.vars.iter()
    }

    pub fn fmuls(&self) -> impl Iterator<Item = (&Term, &Rat)> {
        self.fmuls.iter()
    }

    pub fn fmul_count(&self) -> usize {
        self.fmuls.len()
    }

    /// Evaluates with uninterpreted `fmul`.
    pub fn eval(&self, t: &Term) -> Result<Value, EvalError> {
        evaluate_with(t, self, FmulMode::Lookup)
    }

    /// Evaluates with `fmul` read as multiplication.
    pub fn eval_concrete(&self, t: &Term) -> Result<Value, EvalError> {
        evaluate_with(t, self, FmulMode::Product)
    }

    pub fn eval_real(&self, t: &Term) -> Result<Rat, EvalError> {
        Ok(self.eval(t)?.as_real().cloned().expect("real-sorted term"))
    }

    pub fn eval_bool(&self, t: &Term) -> Result<bool, EvalError> {
        Ok(self.eval(t)?.as_bool().expect("boolean-sorted term"))
    }

    /// True when every recorded `fmul` value equals the product of its
    /// argument values.
    pub fn fmuls_exact(&self) -> bool {
        self.fmuls.iter().all(|(t, v)| {
            let (a, b) = t.fmul_args().unwrap();
            match (self.eval_real(a), self.eval_real(b)) {
                (Ok(x), Ok(y)) => x * y == *v,
                _ => false,
            }
        })
    }

    /// Adds a value for each listed `fmul` term that has none yet, keeping
    /// the function interpretation consistent: an application whose argument
    /// values match a recorded application gets that value, anything else
    /// gets the exact product.
    pub fn extend_fmuls(&mut self, terms: &[Term]) -> Result<(), EvalError> {
        for t in terms {
            if self.fmuls.contains_key(t) {
                continue;
            }
            let (a, b) = t.fmul_args().expect("fmul term");
            let (x, y) = (self.eval_real(a)?, self.eval_real(b)?);
            let v = self.lookup_by_args(&x, &y)?.unwrap_or_else(|| &x * &y);
            self.fmuls.insert(t.clone(), v);
        }
        Ok(())
    }

    fn lookup_by_args(&self, x: &Rat, y: &Rat) -> Result<Option<Rat>, EvalError> {
        for (t, v) in &self.fmuls {
            let (a, b) = t.fmul_args().unwrap();
            let (ax, bx) = (self.eval_real(a)?, self.eval_real(b)?);
            if (&ax == x && &bx == y) || (&ax == y && &bx == x) {
                return Ok(Some(v.clone()));
            }
        }
        Ok(None)
    }

    /// Restriction to the variables satisfying `keep`, without `fmul` entries.
    pub fn restrict<F: Fn(&Var) -> bool>(&self, keep: F) -> Model {
        Model {
            vars: self
                .vars
                .iter()
                .filter(|(v, _)| keep(v))
                .map(|(v, x)| (v.clone(), x.clone()))
                .collect(),
            fmuls: BTreeMap::new(),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, x) in &self.vars {
            writeln!(f, "{v} = {x}")?;
        }
        for (t, x) in &self.fmuls {
            writeln!(f, "{t} = {}", rat::to_plain(x))?;
        }
        Ok(())
    }
}

/// Evaluates `t` under `m` with uninterpreted `fmul`.
pub fn evaluate(t: &Term, m: &Model) -> Result<Value, EvalError> {
    evaluate_with(t, m, FmulMode::Lookup)
}

pub fn evaluate_with(t: &Term, m: &Model, mode: FmulMode) -> Result<Value, EvalError> {
    let real = |t: &Term| -> Result<Rat, EvalError> { Ok(evaluate_with(t, m, mode)?.as_real().cloned().unwrap()) };
    let boolean = |t: &Term| -> Result<bool, EvalError> { Ok(evaluate_with(t, m, mode)?.as_bool().unwrap()) };
    Ok(match t.node() {
        Node::Var(v) => m
            .vars
            .get(v)
            .cloned()
            .ok_or_else(|| EvalError::Unassigned(v.symbol()))?,
        Node::Real(r) => Value::Real(r.clone()),
        Node::Bool(b) => Value::Bool(*b),
        Node::Add(ts) => {
            let mut acc = Rat::zero();
            for u in ts {
                acc += real(u)?;
            }
            Value::Real(acc)
        }
        Node::Scale(c, u) => Value::Real(c * real(u)?),
        Node::Mul(a, b) => Value::Real(real(a)? * real(b)?),
        Node::Fmul(a, b) => match mode {
            FmulMode::Product => Value::Real(real(a)? * real(b)?),
            FmulMode::Lookup => match m.fmuls.get(t) {
                Some(v) => Value::Real(v.clone()),
                None => {
                    let (x, y) = (real(a)?, real(b)?);
                    match m.lookup_by_args(&x, &y)? {
                        Some(v) => Value::Real(v),
                        None => return Err(EvalError::Unassigned(t.to_string())),
                    }
                }
            },
        },
        Node::Ite(c, a, b) => {
            if boolean(c)? {
                evaluate_with(a, m, mode)?
            } else {
                evaluate_with(b, m, mode)?
            }
        }
        Node::Le(a, b) => Value::Bool(real(a)? <= real(b)?),
        Node::Lt(a, b) => Value::Bool(real(a)? < real(b)?),
        Node::Eq(a, b) => Value::Bool(real(a)? == real(b)?),
        Node::Not(a) => Value::Bool(!boolean(a)?),
        Node::And(ts) => {
            let mut all = true;
            for u in ts {
                all &= boolean(u)?;
            }
            Value::Bool(all)
        }
        Node::Or(ts) => {
            let mut any = false;
            for u in ts {
                any |= boolean(u)?;
            }
            Value::Bool(any)
        }
        Node::Implies(a, b) => Value::Bool(!boolean(a)? || boolean(b)?),
        Node::Iff(a, b) => Value::Bool(boolean(a)? == boolean(b)?),
    })
}
