//! Exact-rational term and formula algebra.

pub mod model;
pub mod ops;
pub mod rat;
pub mod term;

pub use model::{evaluate, evaluate_with, EvalError, FmulMode, Model, Value};
pub use ops::{
    at_time, atoms_of, contains_fmul, contains_mul, fmuls_of, retime, steps_of, substitute, untime, vars_of, TermError,
};
pub use rat::Rat;
pub use term::{Node, Sort, Term, Time, Var};
