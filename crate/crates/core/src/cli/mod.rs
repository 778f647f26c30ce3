//! Command-line front end.
//!
//! Exit codes: 0 SAFE/unsat, 1 UNSAFE/sat, 2 UNKNOWN, 3 usage or internal
//! error.

mod bench;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num::BigInt;

use crate::config::{Config, ConstrainMode, Engine, ModelFinder};
use crate::mc::{vmt_nra_check, McVerdict};
use crate::nra::{smt_nra_check, SmtVerdict};
use crate::refinement::LemmaLog;
use crate::smtlib::{parse_script, parse_vmt};
use crate::solver::SolverCommand;
use crate::stats::Journal;

pub use bench::{bench, instances, to_csv, BenchRow, BenchSummary, CSV_HEADER};

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_UNSAFE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nra-cegar",
    version,
    about = "Invariant checking for non-linear real arithmetic by incremental linearization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Mode,
}

#[derive(Subcommand, Debug)]
pub enum Mode {
    /// Check an invariant property of a VMT transition system.
    CheckVmt {
        file: PathBuf,
        /// Index of the `:invar-property` to check (default: the lowest).
        #[arg(long)]
        property: Option<u32>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Decide satisfiability of an SMT-LIB2 QF_NRA script.
    CheckSmt {
        file: PathBuf,
        /// Print the model after `sat`.
        #[arg(long)]
        model: bool,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every .vmt and .smt2 file of a directory and print a CSV table.
    Bench {
        dir: PathBuf,
        /// Parallel workers.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RunOpts {
    #[arg(long, default_value = "kind-houdini")]
    pub engine: Engine,
    /// External checker for `--engine external`; gets the VMT path appended.
    #[arg(long)]
    pub engine_cmd: Option<String>,
    /// LRA+EUF solver command line (default: $NRA_CEGAR_SOLVER or `z3 -in -smt2`).
    #[arg(long)]
    pub solver: Option<String>,
    /// Complete NRA solver used by `--model-finder nra`.
    #[arg(long)]
    pub nra_solver_cmd: Option<String>,
    #[arg(long, default_value = "lines")]
    pub model_finder: ModelFinder,
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 600, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout: u64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_k: u32,
    /// Refinement iterations per SMT(NRA) check.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_refinements: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_cegar_iterations: u64,
    /// Instantiate tangent lemmas at every candidate point.
    #[arg(long)]
    pub all_tangent_points: bool,
    /// Also place time-0 lemmas into the transition relation.
    #[arg(long)]
    pub axioms_everywhere: bool,
    /// Keep all lemmas of a refinement instead of an unsat-core subset.
    #[arg(long)]
    pub no_reduce_axioms: bool,
    #[arg(long, default_value = "none")]
    pub constrain_mode: ConstrainMode,
    /// Values with larger numerator or denominator are rounded before use
    /// as tangent points.
    #[arg(long, default_value = "1000000")]
    pub rounding_threshold: BigInt,
    /// Append every generated lemma to this file.
    #[arg(long)]
    pub dump_lemmas: Option<PathBuf>,
    #[arg(long)]
    pub no_sign_axioms: bool,
    /// Print statistics to stderr.
    #[arg(long)]
    pub stats: bool,
}

impl RunOpts {
    pub fn config(&self) -> Result<Config, String> {
        let mut cfg = Config::default();
        if let Some(s) = &self.solver {
            cfg.solver = SolverCommand::parse(s).ok_or("empty --solver command")?;
        }
        if let Some(s) = &self.nra_solver_cmd {
            cfg.nra_solver = Some(SolverCommand::parse(s).ok_or("empty --nra-solver-cmd command")?);
        }
        if self.engine == Engine::External && self.engine_cmd.is_none() {
            return Err("--engine external needs --engine-cmd".into());
        }
        if self.rounding_threshold <= BigInt::from(0) {
            return Err("--rounding-threshold must be positive".into());
        }
        cfg.engine = self.engine;
        cfg.engine_cmd = self.engine_cmd.clone();
        cfg.model_finder = self.model_finder;
        cfg.timeout = Some(Duration::from_secs(self.timeout));
        cfg.max_k = self.max_k;
        cfg.max_refinements = self.max_refinements as usize;
        cfg.max_cegar_iterations = self.max_cegar_iterations as usize;
        cfg.refine.points.all_points = self.all_tangent_points;
        cfg.refine.points.rounding_threshold = self.rounding_threshold.clone();
        cfg.axioms_everywhere = self.axioms_everywhere;
        cfg.reduce_axioms = !self.no_reduce_axioms;
        cfg.constrain = self.constrain_mode;
        cfg.abstraction.sign_axioms = !self.no_sign_axioms;
        Ok(cfg)
    }

    fn journal(&self) -> Result<Journal, String> {
        let log = match &self.dump_lemmas {
            Some(p) => LemmaLog::open(p).map_err(|e| format!("cannot open {}: {e}", p.display()))?,
            None => LemmaLog::disabled(),
        };
        Ok(Journal::new(log))
    }
}

/// Outcome of checking one file, independent of how it is printed.
#[derive(Debug)]
pub enum FileVerdict {
    Vmt(McVerdict),
    Smt(SmtVerdict),
}

impl FileVerdict {
    /// Verdict word as printed on the verdict line.
    pub fn word(&self) -> &'static str {
        match self {
            FileVerdict::Vmt(McVerdict::Safe) => "SAFE",
            FileVerdict::Vmt(McVerdict::Unsafe(_)) => "UNSAFE",
            FileVerdict::Vmt(McVerdict::Unknown { .. }) => "UNKNOWN",
            FileVerdict::Smt(SmtVerdict::Unsat(_)) => "unsat",
            FileVerdict::Smt(SmtVerdict::Sat(_)) => "sat",
            FileVerdict::Smt(SmtVerdict::Unknown(_)) => "unknown",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            FileVerdict::Vmt(McVerdict::Safe) | FileVerdict::Smt(SmtVerdict::Unsat(_)) => EXIT_SAFE,
            FileVerdict::Vmt(McVerdict::Unsafe(_)) | FileVerdict::Smt(SmtVerdict::Sat(_)) => EXIT_UNSAFE,
            _ => EXIT_UNKNOWN,
        }
    }
}

/// Checks a VMT file.
pub fn check_vmt_file(
    path: &Path,
    property: Option<u32>,
    cfg: &Config,
    journal: &mut Journal,
) -> Result<McVerdict, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let ts = parse_vmt(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let prop = match property {
        Some(i) => ts
            .property(i)
            .ok_or_else(|| format!("{}: no property with index {i}", path.display()))?,
        None => {
            let p = ts.properties.iter().min_by_key(|p| p.index);
            &p.ok_or_else(|| format!("{}: no :invar-property", path.display()))?
                .formula
        }
    }
    .clone();
    vmt_nra_check(&ts, &prop, cfg, journal).map_err(|e| e.to_string())
}

/// Checks an SMT-LIB2 script.
pub fn check_smt_file(path: &Path, cfg: &Config, journal: &mut Journal) -> Result<SmtVerdict, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let script = parse_script(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let started = std::time::Instant::now();
    let v = smt_nra_check(&script.formula(), cfg, cfg.budget(), journal);
    journal.stats.wall_time += started.elapsed();
    if let SmtVerdict::Unknown(why) = &v {
        if why.starts_with("internal error") {
            return Err(why.clone());
        }
    }
    Ok(v)
}

/// Entry point: parses `argv` (including the program name), runs, and
/// returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

fn execute(mode: Mode, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match mode {
        Mode::CheckVmt { file, property, opts } => {
            let cfg = opts.config()?;
            let mut journal = opts.journal()?;
            let v = check_vmt_file(&file, property, &cfg, &mut journal)?;
            writeln!(out, "{}", FileVerdict::Vmt(v.clone()).word()).map_err(io)?;
            match &v {
                McVerdict::Unsafe(trace) => write!(out, "{trace}").map_err(io)?,
                McVerdict::Unknown { reason, detail } => log::info!("unknown ({reason}): {detail}"),
                McVerdict::Safe => {}
            }
            if opts.stats {
                writeln!(err, "{}", journal.stats).map_err(io)?;
            }
            Ok(FileVerdict::Vmt(v).exit_code())
        }
        Mode::CheckSmt { file, model, opts } => {
            let cfg = opts.config()?;
            let mut journal = opts.journal()?;
            let v = check_smt_file(&file, &cfg, &mut journal)?;
            writeln!(out, "{}", FileVerdict::Smt(v.clone()).word()).map_err(io)?;
            match &v {
                SmtVerdict::Sat(m) if model => {
                    for (var, val) in m.vars() {
                        writeln!(out, "{} = {}", var, val).map_err(io)?;
                    }
                }
                SmtVerdict::Unknown(why) => log::info!("unknown: {why}"),
                _ => {}
            }
            if opts.stats {
                writeln!(err, "{}", journal.stats).map_err(io)?;
            }
            Ok(FileVerdict::Smt(v).exit_code())
        }
        Mode::Bench { dir, jobs, opts } => {
            let cfg = opts.config()?;
            let (rows, summary) = bench(&dir, &cfg, jobs as usize)?;
            write!(out, "{}", to_csv(&rows)).map_err(io)?;
            writeln!(err, "{summary}").map_err(io)?;
            Ok(if summary.mismatches > 0 { EXIT_UNSAFE } else { EXIT_SAFE })
        }
    }
}
