//! External SMT-LIB2 solver processes driven over stdin/stdout.
//!
//! A [`Session`] owns one child process. Every command is echoed with
//! `success` (`:print-success`), so each write is matched by exactly one
//! response. Commands that change the assertion stack are also kept in a
//! replay log; after a timeout the child is killed, restarted and the log
//! replayed, so the session survives with its stack intact.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use crate::smtlib::parse::parse_rational_literal;
use crate::smtlib::print::{fmul_declaration, term_to_smtlib, var_symbol};
use crate::smtlib::sexp::{self, Sexp, Splitter};
use crate::terms::{fmuls_of, vars_of, Model, Sort, Term, Value, Var};

/// Environment variable overriding the default solver command line.
pub const SOLVER_ENV: &str = "NRA_CEGAR_SOLVER";
pub const DEFAULT_SOLVER: &str = "z3 -in -smt2";

/// Protocol commands that are not expected to take long.
const COMMAND_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverCommand {
    pub program: String,
    pub args: Vec<String>,
}

impl SolverCommand {
    pub fn parse(line: &str) -> Option<SolverCommand> {
        let mut words = line.split_whitespace().map(str::to_string);
        Some(SolverCommand {
            program: words.next()?,
            args: words.collect(),
        })
    }

    /// `$NRA_CEGAR_SOLVER`, else `z3 -in -smt2`.
    pub fn from_env() -> SolverCommand {
        std::env::var(SOLVER_ENV)
            .ok()
            .and_then(|s| SolverCommand::parse(&s))
            .unwrap_or_else(|| SolverCommand::parse(DEFAULT_SOLVER).unwrap())
    }

    /// Whether the program can be spawned and answers a trivial query.
    pub fn is_available(&self) -> bool {
        Session::start(self, Logic::UfLra)
            .and_then(|mut s| s.check_sat(Some(Duration::from_secs(10))))
            .is_ok()
    }
}

impl fmt::Display for SolverCommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.program)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Logic {
    /// Linear reals with uninterpreted functions; `fmul` is declared.
    UfLra,
    /// Non-linear reals; `mul` nodes are sent as `*`.
    Nra,
}

impl Logic {
    fn name(self) -> &'static str {
        match self {
            Logic::UfLra => "QF_UFLRA",
            Logic::Nra => "QF_NRA",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("cannot start solver `{command}`: {msg}")]
    Spawn { command: String, msg: String },
    #[error("solver process exited unexpectedly")]
    Crashed,
    #[error("solver did not answer in time")]
    Timeout,
    #[error("solver error: {0}")]
    Protocol(String),
    #[error("irrational model value for `{0}`")]
    Irrational(String),
}

/// Answer to `check-sat`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    Unknown(String),
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Sat(Model),
    /// Labels of an unsatisfiable subset of the named assertions.
    Unsat(Vec<String>),
    Unknown(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub checks: u64,
    pub restarts: u64,
}

#[derive(Default, Clone)]
struct Frame {
    replay: Vec<String>,
    vars: BTreeSet<Var>,
    fmuls: BTreeSet<Term>,
    labels: BTreeMap<String, Term>,
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    rx: Receiver<String>,
}

impl Process {
    fn spawn(cmd: &SolverCommand) -> Result<Process, SolverError> {
        let mut child = Command::new(&cmd.program)
            .args(&cmd.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SolverError::Spawn {
                command: cmd.to_string(),
                msg: e.to_string(),
            })?;
        let stdin = child.stdin.take().unwrap();
        let stdout = child.stdout.take().unwrap();
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            let mut splitter = Splitter::default();
            let mut line = String::new();
            loop {
                line.clear();
                match reader.read_line(&mut line) {
                    Ok(0) | Err(_) => break,
                    Ok(_) => {
                        if let Some(e) = splitter.feed(&line) {
                            if tx.send(e).is_err() {
                                break;
                            }
                        }
                    }
                }
            }
        });
        Ok(Process { child, stdin, rx })
    }

    fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// One solver process with an incremental assertion stack.
pub struct Session {
    command: SolverCommand,
    logic: Logic,
    proc: Process,
    declared: BTreeSet<Var>,
    decls: Vec<String>,
    frames: Vec<Frame>,
    next_label: u64,
    used_labels: BTreeSet<String>,
    stats: SolverStats,
}

impl Session {
    pub fn start(command: &SolverCommand, logic: Logic) -> Result<Session, SolverError> {
        let proc = Process::spawn(command)?;
        let mut s = Session {
            command: command.clone(),
            logic,
            proc,
            declared: BTreeSet::new(),
            decls: Vec::new(),
            frames: vec![Frame::default()],
            next_label: 0,
            used_labels: BTreeSet::new(),
            stats: SolverStats::default(),
        };
        s.handshake().map_err(|e| match e {
            SolverError::Spawn { .. } => e,
            other => SolverError::Spawn {
                command: command.to_string(),
                msg: format!("handshake failed: {other}"),
            },
        })?;
        Ok(s)
    }

    fn preamble(&self) -> Vec<String> {
        let mut cmds = vec![
            "(set-option :print-success true)".to_string(),
            "(set-option :produce-models true)".to_string(),
            "(set-option :produce-unsat-cores true)".to_string(),
            "(set-option :global-declarations true)".to_string(),
            format!("(set-logic {})", self.logic.name()),
        ];
        if self.logic == Logic::UfLra {
            cmds.push(fmul_declaration().trim().to_string());
        }
        cmds
    }

    fn handshake(&mut self) -> Result<(), SolverError> {
        let mut cmds = self.preamble();
        cmds.extend(self.decls.iter().cloned());
        for (i, f) in self.frames.iter().enumerate() {
            if i > 0 {
                cmds.push("(push 1)".into());
            }
            cmds.extend(f.replay.iter().cloned());
        }
        self.run_batch(&cmds)
    }

    fn restart(&mut self) -> Result<(), SolverError> {
        self.proc.kill();
        self.proc = Process::spawn(&self.command)?;
        self.stats.restarts += 1;
        self.handshake()
    }

    pub fn logic(&self) -> Logic {
        self.logic
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Number of open `push` scopes.
    pub fn depth(&self) -> usize {
        self.frames.len() - 1
    }

    fn write(&mut self, text: &str) -> Result<(), SolverError> {
        log::trace!("smt> {text}");
        writeln!(self.proc.stdin, "{text}")
            .and_then(|_| self.proc.stdin.flush())
            .map_err(|_| SolverError::Crashed)
    }

    fn read(&mut self, timeout: Duration) -> Result<String, SolverError> {
        match self.proc.rx.recv_timeout(timeout) {
            Ok(s) => {
                log::trace!("smt< {}", s.trim_end());
                Ok(s)
            }
            Err(RecvTimeoutError::Timeout) => Err(SolverError::Timeout),
            Err(RecvTimeoutError::Disconnected) => Err(SolverError::Crashed),
        }
    }

    fn expect_success(&mut self, sent: &str) -> Result<(), SolverError> {
        let reply = self.read(COMMAND_TIMEOUT)?;
        if reply.trim() == "success" {
            Ok(())
        } else {
            Err(SolverError::Protocol(format!(
                "{} (after `{sent}`)",
                error_text(&reply)
            )))
        }
    }

    /// Sends commands in one write and then collects their acknowledgements.
    fn run_batch(&mut self, cmds: &[String]) -> Result<(), SolverError> {
        if cmds.is_empty() {
            return Ok(());
        }
        self.write(&cmds.join("\n"))?;
        for c in cmds {
            self.expect_success(c)?;
        }
        Ok(())
    }

    fn declare_symbols(&mut self, t: &Term, out: &mut Vec<String>) {
        for v in vars_of(t) {
            if self.declared.insert(v.clone()) {
                let d = format!("(declare-fun {} () {})", var_symbol(&v), v.sort);
                self.decls.push(d.clone());
                out.push(d);
            }
        }
    }

    fn track(&mut self, t: &Term) {
        let frame = self.frames.last_mut().unwrap();
        frame.vars.extend(vars_of(t));
        frame.fmuls.extend(fmuls_of(t));
    }

    pub fn assert(&mut self, t: &Term) -> Result<(), SolverError> {
        let mut cmds = Vec::new();
        self.declare_symbols(t, &mut cmds);
        let a = format!("(assert {})", term_to_smtlib(t));
        cmds.push(a.clone());
        self.run_batch(&cmds)?;
        self.frames.last_mut().unwrap().replay.push(a);
        self.track(t);
        Ok(())
    }

    /// Asserts `t` under a fresh label, returned for matching against
    /// unsat cores.
    pub fn assert_named(&mut self, t: &Term) -> Result<String, SolverError> {
        let label = format!("a!{}", self.next_label);
        self.next_label += 1;
        self.assert_labeled(&label, t)?;
        Ok(label)
    }

    fn assert_labeled(&mut self, label: &str, t: &Term) -> Result<(), SolverError> {
        // names stay defined after pop under global declarations
        if !self.used_labels.insert(label.to_string()) {
            return Err(SolverError::Protocol(format!("duplicate label `{label}`")));
        }
        let mut cmds = Vec::new();
        self.declare_symbols(t, &mut cmds);
        let a = format!("(assert (! {} :named {}))", term_to_smtlib(t), label);
        cmds.push(a.clone());
        self.run_batch(&cmds)?;
        let frame = self.frames.last_mut().unwrap();
        frame.replay.push(a);
        frame.labels.insert(label.to_string(), t.clone());
        self.track(t);
        Ok(())
    }

    pub fn push(&mut self) -> Result<(), SolverError> {
        self.run_batch(&["(push 1)".to_string()])?;
        self.frames.push(Frame::default());
        Ok(())
    }

    pub fn pop(&mut self) -> Result<(), SolverError> {
        if self.frames.len() == 1 {
            return Err(SolverError::Protocol("pop on an empty stack".into()));
        }
        self.run_batch(&["(pop 1)".to_string()])?;
        self.frames.pop();
        Ok(())
    }

    /// `check-sat` with an optional wall-clock limit. A timeout kills and
    /// restarts the process and reports unknown.
    pub fn check_sat(&mut self, timeout: Option<Duration>) -> Result<SatResult, SolverError> {
        self.stats.checks += 1;
        self.write("(check-sat)")?;
        let reply = match self.read(timeout.unwrap_or(Duration::from_secs(u32::MAX as u64))) {
            Ok(r) => r,
            Err(SolverError::Timeout) => {
                self.restart()?;
                return Ok(SatResult::Unknown("timeout".into()));
            }
            Err(e) => return Err(e),
        };
        match reply.trim() {
            "sat" => Ok(SatResult::Sat),
            "unsat" => Ok(SatResult::Unsat),
            "unknown" => Ok(SatResult::Unknown("solver returned unknown".into())),
            other => Err(SolverError::Protocol(error_text(other))),
        }
    }

    /// Values for every variable and fmul application asserted in the open
    /// scopes, after a `sat` answer.
    pub fn model(&mut self) -> Result<Model, SolverError> {
        let mut vars = BTreeSet::new();
        let mut fmuls = BTreeSet::new();
        for f in &self.frames {
            vars.extend(f.vars.iter().cloned());
            fmuls.extend(f.fmuls.iter().cloned());
        }
        let mut model = Model::new();
        let vars: Vec<Var> = vars.into_iter().collect();
        let fmuls: Vec<Term> = fmuls.into_iter().collect();
        let mut names: Vec<String> = vars.iter().map(var_symbol).collect();
        names.extend(fmuls.iter().map(term_to_smtlib));
        if names.is_empty() {
            return Ok(model);
        }
        let values = self.get_values(&names)?;
        for (v, (name, val)) in vars.iter().zip(names.iter().zip(values.iter())) {
            let value = match v.sort {
                Sort::Bool => match val.as_symbol() {
                    Some("true") => Value::Bool(true),
                    Some("false") => Value::Bool(false),
                    _ => return Err(SolverError::Protocol(format!("bad Bool value for `{name}`: {val}"))),
                },
                Sort::Real => Value::Real(real_value(name, val)?),
            };
            model.set(v.clone(), value);
        }
        for (t, (name, val)) in fmuls
            .iter()
            .zip(names[vars.len()..].iter().zip(values[vars.len()..].iter()))
        {
            model.set_fmul(t.clone(), real_value(name, val)?);
        }
        Ok(model)
    }

    fn get_values(&mut self, names: &[String]) -> Result<Vec<Sexp>, SolverError> {
        self.write(&format!("(get-value ({}))", names.join(" ")))?;
        let reply = self.read(COMMAND_TIMEOUT)?;
        let parsed = sexp::parse_one(&reply).map_err(|e| SolverError::Protocol(format!("unparsable model: {e}")))?;
        let pairs = parsed
            .as_list()
            .filter(|l| l.len() == names.len() && parsed.head() != Some("error"))
            .ok_or_else(|| SolverError::Protocol(error_text(&reply)))?;
        pairs
            .iter()
            .map(|p| match p.as_list() {
                Some([_, v]) => Ok(v.clone()),
                _ => Err(SolverError::Protocol(format!("malformed get-value entry {p}"))),
            })
            .collect()
    }

    /// Labels of the last unsat core.
    pub fn unsat_core(&mut self) -> Result<Vec<String>, SolverError> {
        self.write("(get-unsat-core)")?;
        let reply = self.read(COMMAND_TIMEOUT)?;
        let parsed = sexp::parse_one(&reply).map_err(|e| SolverError::Protocol(e.to_string()))?;
        match parsed.as_list() {
            Some(items) if parsed.head() != Some("error") => Ok(items
                .iter()
                .filter_map(|s| s.as_symbol().map(|s| s.trim_matches('|').to_string()))
                .collect()),
            _ => Err(SolverError::Protocol(error_text(&reply))),
        }
    }

    /// Checks the current stack plus `assertions` in a scratch scope. Core
    /// labels refer to the caller's labels, which may repeat across calls.
    pub fn check(&mut self, assertions: &[(String, Term)], timeout: Option<Duration>) -> Result<Verdict, SolverError> {
        self.push()?;
        let result = self.check_in_scope(assertions, timeout);
        let popped = self.pop();
        let verdict = result?;
        popped?;
        Ok(verdict)
    }

    fn check_in_scope(
        &mut self,
        assertions: &[(String, Term)],
        timeout: Option<Duration>,
    ) -> Result<Verdict, SolverError> {
        let mut wire = BTreeMap::new();
        for (label, t) in assertions {
            let w = self.assert_named(t)?;
            wire.insert(w, label.clone());
        }
        match self.check_sat(timeout)? {
            SatResult::Sat => match self.model() {
                Ok(m) => Ok(Verdict::Sat(m)),
                Err(SolverError::Irrational(x)) => Ok(Verdict::Unknown(format!("irrational value for `{x}`"))),
                Err(SolverError::Protocol(msg)) => Ok(Verdict::Unknown(format!("unparsable model: {msg}"))),
                Err(e) => Err(e),
            },
            SatResult::Unsat => {
                let core = self.unsat_core()?;
                let mut labels: Vec<String> = core.into_iter().filter_map(|w| wire.get(&w).cloned()).collect();
                labels.sort();
                labels.dedup();
                Ok(Verdict::Unsat(labels))
            }
            SatResult::Unknown(reason) => Ok(Verdict::Unknown(reason)),
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = writeln!(self.proc.stdin, "(exit)");
        let _ = self.proc.stdin.flush();
        let deadline = Instant::now() + Duration::from_millis(200);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.proc.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(5));
        }
        self.proc.kill();
    }
}

fn real_value(name: &str, val: &Sexp) -> Result<crate::terms::Rat, SolverError> {
    if val.head() == Some("root-obj") {
        return Err(SolverError::Irrational(name.to_string()));
    }
    parse_rational_literal(val).ok_or_else(|| SolverError::Protocol(format!("unsupported value for `{name}`: {val}")))
}

fn error_text(reply: &str) -> String {
    match sexp::parse_one(reply) {
        Ok(Sexp::List(items, _)) if items.first().and_then(Sexp::as_symbol) == Some("error") => match items.get(1) {
            Some(Sexp::Str(s, _)) => s.clone(),
            Some(other) => other.to_string(),
            None => "unspecified error".into(),
        },
        _ => format!("unexpected reply `{}`", reply.trim()),
    }
}
