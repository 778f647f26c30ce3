//! Runs a directory of instances and tabulates the verdicts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use super::{check_smt_file, check_vmt_file, FileVerdict};
use crate::config::Config;
use crate::stats::Journal;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub file: String,
    /// Verdict word, or `ERROR` when the file could not be checked.
    pub verdict: String,
    pub expected: Option<String>,
    pub seconds: f64,
    pub iterations: u64,
    pub lemmas: u64,
}

impl BenchRow {
    pub fn mismatch(&self) -> bool {
        self.expected
            .as_ref()
            .is_some_and(|e| !e.eq_ignore_ascii_case(&self.verdict))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenchSummary {
    pub total: usize,
    pub safe: usize,
    pub unsafe_: usize,
    pub unknown: usize,
    pub errors: usize,
    pub mismatches: usize,
}

impl fmt::Display for BenchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "solved {}/{} (safe {}, unsafe {}), unknown {}, errors {}, mismatches {}",
            self.safe + self.unsafe_,
            self.total,
            self.safe,
            self.unsafe_,
            self.unknown,
            self.errors,
            self.mismatches
        )
    }
}

/// `.vmt` and `.smt2` files of `dir`, sorted by name.
pub fn instances(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let entries = std::fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("vmt" | "smt2")))
        .collect();
    files.sort();
    Ok(files)
}

fn expected_for(path: &Path) -> Option<String> {
    let text = std::fs::read_to_string(path.with_extension("expected")).ok()?;
    text.split_whitespace().next().map(str::to_string)
}

fn run_one(path: &Path, cfg: &Config) -> BenchRow {
    let mut journal = Journal::default();
    let started = Instant::now();
    let verdict = match path.extension().and_then(|e| e.to_str()) {
        Some("vmt") => check_vmt_file(path, None, cfg, &mut journal).map(FileVerdict::Vmt),
        _ => check_smt_file(path, cfg, &mut journal).map(FileVerdict::Smt),
    };
    let verdict = match verdict {
        Ok(v) => v.word().to_string(),
        Err(e) => {
            log::warn!("{e}");
            "ERROR".to_string()
        }
    };
    let s = &journal.stats;
    BenchRow {
        file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        verdict,
        expected: expected_for(path),
        seconds: started.elapsed().as_secs_f64(),
        iterations: if s.cegar_iterations > 0 {
            s.cegar_iterations
        } else {
            s.refinement_iterations
        },
        lemmas: s.lemmas.total(),
    }
}

/// Checks every instance of `dir` on `jobs` worker threads. Rows come back
/// in file-name order whatever the scheduling.
pub fn bench(dir: &Path, cfg: &Config, jobs: usize) -> Result<(Vec<BenchRow>, BenchSummary), String> {
    let files = instances(dir)?;
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; files.len()]);
    thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(files.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = files.get(i) else { break };
                let row = run_one(path, cfg);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows: Vec<BenchRow> = rows
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every file ran"))
        .collect();
    let mut summary = BenchSummary {
        total: rows.len(),
        ..BenchSummary::default()
    };
    for r in &rows {
        match r.verdict.as_str() {
            "SAFE" | "unsat" => summary.safe += 1,
            "UNSAFE" | "sat" => summary.unsafe_ += 1,
            "ERROR" => summary.errors += 1,
            _ => summary.unknown += 1,
        }
        summary.mismatches += r.mismatch() as usize;
    }
    Ok((rows, summary))
}

pub const CSV_HEADER: &str = "file,verdict,expected,status,time,iterations,lemmas";

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).unwrap();
    for r in rows {
        let status = match (&r.expected, r.mismatch()) {
            (None, _) => "",
            (Some(_), true) => "MISMATCH",
            (Some(_), false) => "ok",
        };
        w.write_record([
            r.file.as_str(),
            &r.verdict,
            r.expected.as_deref().unwrap_or(""),
            status,
            &format!("{:.3}", r.seconds),
            &r.iterations.to_string(),
            &r.lemmas.to_string(),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(verdict: &str, expected: Option<&str>) -> BenchRow {
        BenchRow {
            file: "a.vmt".into(),
            verdict: verdict.into(),
            expected: expected.map(str::to_string),
            seconds: 0.25,
            iterations: 3,
            lemmas: 7,
        }
    }

    #[test]
    fn mismatch_is_flagged() {
        let csv = to_csv(&[
            row("UNSAFE", Some("SAFE")),
            row("SAFE", Some("SAFE")),
            row("UNKNOWN", None),
        ]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "a.vmt,UNSAFE,SAFE,MISMATCH,0.250,3,7");
        assert_eq!(lines[2], "a.vmt,SAFE,SAFE,ok,0.250,3,7");
        assert_eq!(lines[3], "a.vmt,UNKNOWN,,,0.250,3,7");
    }

    #[test]
    fn empty_dir() {
        let dir = tempfile::tempdir().unwrap();
        let (rows, summary) = bench(dir.path(), &Config::default(), 4).unwrap();
        assert!(rows.is_empty());
        assert_eq!(summary.mismatches, 0);
        assert_eq!(to_csv(&rows), format!("{CSV_HEADER}\n"));
    }
}
