//! Run the bundled corpus and print the CSV table and summary line.
//!
//! cargo run --release --example bench_corpus -- [dir] [jobs]

use std::path::PathBuf;

use nra_cegar::cli::bench;
use nra_cegar::config::Config;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus").into());
    let jobs = args.next().and_then(|j| j.parse().ok()).unwrap_or(4);
    let cfg = Config::default();
    if !cfg.solver.is_available() {
        eprintln!("solver `{}` not found; set NRA_CEGAR_SOLVER", cfg.solver);
        return;
    }
    match bench(&dir, &cfg, jobs) {
        Ok((rows, summary)) => {
            print!("{}", nra_cegar::cli::to_csv(&rows));
            println!("{summary}");
            if summary.mismatches > 0 {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    }
}
