//! Parse a VMT transition system, inspect it, and print it back.
//!
//! cargo run --example vmt_roundtrip -- crates/core/corpus/intro.vmt

use nra_cegar::smtlib::{parse_vmt, serialize_vmt};

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/intro.vmt").into());
    let text = std::fs::read_to_string(&path).expect("readable VMT file");
    let ts = match parse_vmt(&text) {
        Ok(ts) => ts,
        Err(e) => {
            eprintln!("{path}: {e}");
            std::process::exit(3);
        }
    };

    println!("state variables:");
    for s in &ts.vars {
        println!("  {} : {} (next: {})", s.var, s.var.sort, s.next_symbol);
    }
    println!("init:  {}", ts.init);
    println!("trans: {}", ts.trans);
    for p in &ts.properties {
        println!("property {}: {}", p.index, p.formula);
    }

    let again = parse_vmt(&serialize_vmt(&ts)).expect("serializer output parses");
    assert_eq!(again, ts);
    println!("\nround trip through serialize_vmt is the identity");
}
