//! The running example: z = x*y while x and y grow in lockstep.
//! z >= x + y is an invariant; z <= 100 is not.

use nra_cegar::config::Config;
use nra_cegar::mc::{vmt_nra_check, McVerdict};
use nra_cegar::smtlib::parse_vmt;
use nra_cegar::stats::Journal;

fn check(name: &str, text: &str, cfg: &Config) {
    let ts = parse_vmt(text).unwrap();
    let prop = ts.property(0).unwrap().clone();
    let mut journal = Journal::default();
    match vmt_nra_check(&ts, &prop, cfg, &mut journal) {
        Ok(McVerdict::Safe) => println!("{name}: SAFE"),
        Ok(McVerdict::Unsafe(trace)) => {
            println!("{name}: UNSAFE, {} states", trace.len());
            print!("{trace}");
        }
        Ok(McVerdict::Unknown { reason, detail }) => println!("{name}: UNKNOWN ({reason}: {detail})"),
        Err(e) => println!("{name}: error: {e}"),
    }
    println!("{}\n", journal.stats);
}

fn main() {
    let cfg = Config::default();
    if !cfg.solver.is_available() {
        eprintln!("solver `{}` not found; set NRA_CEGAR_SOLVER", cfg.solver);
        return;
    }
    check("z >= x + y", include_str!("../corpus/intro.vmt"), &cfg);
    check("z <= 100", include_str!("../corpus/intro_z_le_100.vmt"), &cfg);
}
