//! Counters reported with `--stats`.

use std::fmt;
use std::time::Duration;

use crate::axiom::LemmaCounts;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub cegar_iterations: u64,
    pub refinement_iterations: u64,
    pub lemmas: LemmaCounts,
    pub solver_calls: u64,
    /// Internal consistency checks performed (debug builds).
    pub self_checks: u64,
    pub wall_time: Duration,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cegar-iterations: {}", self.cegar_iterations)?;
        writeln!(f, "refinement-iterations: {}", self.refinement_iterations)?;
        writeln!(f, "lemmas-static: {}", self.lemmas.static_)?;
        writeln!(f, "lemmas-tangent: {}", self.lemmas.tangent)?;
        writeln!(f, "lemmas-monotonicity: {}", self.lemmas.monotonicity)?;
        writeln!(f, "solver-calls: {}", self.solver_calls)?;
        if self.self_checks > 0 {
            writeln!(f, "self-checks: {}", self.self_checks)?;
        }
        write!(f, "wall-time: {:.3}s", self.wall_time.as_secs_f64())
    }
}

/// Counters plus the lemma log of one run.
#[derive(Default)]
pub struct Journal {
    pub stats: Stats,
    pub log: crate::refinement::LemmaLog,
}

impl Journal {
    pub fn new(log: crate::refinement::LemmaLog) -> Journal {
        Journal {
            stats: Stats::default(),
            log,
        }
    }

    pub fn lemma(&mut self, a: &crate::axiom::Axiom) {
        self.stats.lemmas.record(a);
        self.log.record(a);
    }
}
