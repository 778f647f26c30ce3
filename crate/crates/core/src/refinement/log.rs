//! Append-only lemma log, one s-expression per line.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::axiom::Axiom;

#[derive(Default)]
pub struct LemmaLog {
    out: Option<BufWriter<File>>,
}

impl LemmaLog {
    pub fn disabled() -> LemmaLog {
        LemmaLog { out: None }
    }

    pub fn open(path: &Path) -> io::Result<LemmaLog> {
        let f = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(LemmaLog {
            out: Some(BufWriter::new(f)),
        })
    }

    pub fn record(&mut self, a: &Axiom) {
        if let Some(w) = &mut self.out {
            if writeln!(w, "{}", a.to_sexp()).and_then(|_| w.flush()).is_err() {
                log::warn!("lemma log write failed; disabling it");
                self.out = None;
            }
        }
    }

    pub fn comment(&mut self, text: &str) {
        if let Some(w) = &mut self.out {
            let _ = writeln!(w, "; {text}");
        }
    }
}
