// Decide a few formulas with the full pipeline and show which stage
// answered.
//
//     cargo run --example check_formula

use std::fmt::Write as _;

use ltlf_check::{check, parse, CheckOptions};

pub fn run_example() -> String {
    let mut out = String::new();
    for text in ["G (a U b)", "G F a & G F !a", "X false", "b & N false", "a & G F !a", "a U (b & X !b)"] {
        let f = parse(text).expect("valid formula");
        let r = check(&f, &CheckOptions::default()).expect("small formulas fit the budget");
        let witness = r.witness.map(|w| format!("witness: {w}")).unwrap_or_default();
        let line = format!("{text:<20} {:<6} {:<18}{witness}", r.verdict, r.technique);
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    out
}

fn main() {
    print!("{}", run_example());
}
