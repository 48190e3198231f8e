// The obligation queries go to an embedded CDCL solver by default. Any
// DIMACS solver can replace it; failures fall back to the embedded one.
//
//     cargo run --example external_sat_solver -- 'minisat {file} /dev/stdout'

use std::fmt::Write as _;
use std::time::Duration;

use ltlf_check::obligations::obligations;
use ltlf_check::sat::{encode, ExternalSolver, SatBackend};
use ltlf_check::{check, parse, CheckOptions};

pub fn run_example_with(command: Option<String>) -> String {
    let mut out = String::new();
    let f = parse("G (a -> F b) & (a U (b & !a))").unwrap();
    let off = obligations(&f).off;
    writeln!(out, "off = {off}\n{}", encode(&off).cnf.to_dimacs()).unwrap();

    let sat = match command {
        Some(command) => SatBackend::External(ExternalSolver {
            command,
            timeout: Duration::from_secs(10),
        }),
        None => SatBackend::Embedded,
    };
    let r = check(&f, &CheckOptions { sat, ..CheckOptions::default() }).unwrap();
    writeln!(out, "{}: {} by {}", f, r.verdict, r.technique).unwrap();
    out
}

pub fn run_example() -> String {
    run_example_with(None)
}

fn main() {
    print!("{}", run_example_with(std::env::args().nth(1)));
}
