//! Invariant checking for transition systems over non-linear real
//! arithmetic, by abstracting multiplication into an uninterpreted function
//! and refining the abstraction with linear lemmas.

pub mod abstraction;
pub mod axiom;
pub mod cli;
pub mod config;
pub mod mc;
pub mod nra;
pub mod refinement;
pub mod smtlib;
pub mod solver;
pub mod stats;
pub mod terms;
