// The propositional obligation formulas and the two SAT shortcuts.
//
//     cargo run --example obligations

use std::fmt::Write as _;

use ltlf_check::obligations::{accelerate_global, accelerate_off, obligations};
use ltlf_check::parse;
use ltlf_check::sat::SatBackend;

pub fn run_example() -> String {
    let mut out = String::new();
    for text in ["a U b", "X a & b", "G X a", "N a", "a & G F !a"] {
        let o = obligations(&parse(text).unwrap());
        writeln!(out, "{text:<12} off: {:<10} ofr: {:<10} ofg: {}", o.off, o.ofr, o.ofg).unwrap();
    }

    // off satisfiable: a model A yields a trace A A .. A.
    let r = accelerate_off(&parse("X X a").unwrap(), &SatBackend::Embedded).unwrap();
    writeln!(out, "X X a via off: {}", r.witness.unwrap()).unwrap();
    // Unsatisfiable off decides nothing.
    assert!(accelerate_off(&parse("a & G F !a").unwrap(), &SatBackend::Embedded).is_none());

    // For G psi the global obligation decides both ways.
    for text in ["G X a", "G N a", "G (a U b) & G !b"] {
        let f = ltlf_check::obligations::merge_globals(&parse(text).unwrap());
        let r = accelerate_global(&f, &SatBackend::Embedded).unwrap();
        writeln!(out, "{text} via ofg: {}", r.verdict).unwrap();
    }
    out
}

fn main() {
    print!("{}", run_example());
}
