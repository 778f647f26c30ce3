//! Run configuration shared by the SMT loop and the model checker.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::abstraction::AbstractionConfig;
use crate::refinement::RefineConfig;
use crate::solver::SolverCommand;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelFinder {
    /// Accept the abstract model only if every fmul value is exact.
    Eval,
    /// Search along multiplication lines with the LRA+EUF solver.
    Lines,
    /// Ask an external complete NRA solver; falls back to `Lines`.
    Nra,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Bmc,
    Kind,
    KindHoudini,
    External,
}

/// Which state variables of an abstract counterexample are pinned when
/// checking it against the concrete semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstrainMode {
    None,
    Bool,
    Full,
}

macro_rules! named_enum {
    ($ty:ident { $($v:ident => $s:literal),* $(,)? }) => {
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok($ty::$v),)*
                    other => Err(format!("unknown value `{other}` (expected one of: {})", [$($s),*].join(", "))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$v => $s,)* })
            }
        }
    };
}

named_enum!(ModelFinder { Eval => "eval", Lines => "lines", Nra => "nra" });
named_enum!(Engine { Bmc => "bmc", Kind => "kind", KindHoudini => "kind-houdini", External => "external" });
named_enum!(ConstrainMode { None => "none", Bool => "bool", Full => "full" });

#[derive(Clone, Debug)]
pub struct Config {
    pub solver: SolverCommand,
    pub nra_solver: Option<SolverCommand>,
    pub model_finder: ModelFinder,
    pub abstraction: AbstractionConfig,
    pub refine: RefineConfig,
    /// Refinement iterations per SMT(NRA) check.
    pub max_refinements: usize,
    /// Abstract models with longer numerators or denominators end the
    /// refinement loop; lemmas at such points only chase irrational limits.
    pub max_value_digits: usize,
    pub timeout: Option<Duration>,
    pub engine: Engine,
    pub engine_cmd: Option<String>,
    pub max_k: u32,
    pub max_cegar_iterations: usize,
    pub constrain: ConstrainMode,
    pub reduce_axioms: bool,
    /// Also place time-0 lemmas into the transition relation.
    pub axioms_everywhere: bool,
    /// Re-verify untiming and reductions while checking (on in debug builds).
    pub self_check: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            solver: SolverCommand::from_env(),
            nra_solver: None,
            model_finder: ModelFinder::Lines,
            abstraction: AbstractionConfig::default(),
            refine: RefineConfig::default(),
            max_refinements: 100,
            max_value_digits: 100,
            timeout: Some(Duration::from_secs(600)),
            engine: Engine::KindHoudini,
            engine_cmd: None,
            max_k: 50,
            max_cegar_iterations: 100,
            constrain: ConstrainMode::None,
            reduce_axioms: true,
            axioms_everywhere: false,
            self_check: cfg!(debug_assertions),
        }
    }
}

impl Config {
    pub fn budget(&self) -> Budget {
        Budget {
            max_iterations: self.max_refinements,
            deadline: self.timeout.map(|t| Instant::now() + t),
        }
    }
}

/// Iteration and wall-clock limits for one loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_iterations: usize,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn iterations(n: usize) -> Budget {
        Budget {
            max_iterations: n,
            deadline: None,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Budget {
        self.deadline = deadline;
        self
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Time left, saturating at zero; `None` without a deadline.
    pub fn remaining(&self) -> Option<Duration> {
        self.deadline.map(|d| d.saturating_duration_since(Instant::now()))
    }
}
