//! SMT-LIB2 and VMT front end.

pub mod parse;
pub mod print;
pub mod script;
pub mod sexp;
pub mod system;
pub mod vmt;

pub use parse::{parse_smt2_formula, ParseError};
pub use print::{formula_to_script, term_to_smtlib};
pub use script::{parse_script, Script};
pub use system::{Property, StateVar, TransitionSystem};
pub use vmt::{parse_vmt, serialize_vmt};

/// Serializes a formula as a self-contained SMT-LIB2 script.
pub fn serialize_smt2(f: &crate::terms::Term) -> String {
    formula_to_script(f)
}
