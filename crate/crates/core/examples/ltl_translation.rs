// Translate finite-trace formulas to infinite-trace LTL, and plug an
// external LTL solver into the checker.
//
//     cargo run --example ltl_translation

use std::fmt::Write as _;
use std::sync::Arc;

use ltlf_check::ltl_bridge::{is_xw_free, translate_to_ltl, CommandLtlSolver};
use ltlf_check::{check, parse, CheckOptions};

pub fn run_example() -> String {
    let mut out = String::new();
    for text in ["p", "X a", "a U b", "G (a -> N b)"] {
        writeln!(out, "{text:<14} => {}", translate_to_ltl(&parse(text).unwrap())).unwrap();
    }

    // Any command reading `{file}` and printing sat/unsat will do; this
    // stand-in answers unsat for everything, which is only safe because
    // the formula really is unsatisfiable.
    let solver = CommandLtlSolver::new("cat {file} >/dev/null; echo unsat");
    let options = CheckOptions {
        ofg: false,
        ofp: Some(Arc::new(solver)),
        ..CheckOptions::default()
    };
    let f = parse("G F a & G F !a").unwrap();
    assert!(is_xw_free(&f));
    let r = check(&f, &options).unwrap();
    writeln!(out, "{f}: {} by {}", r.verdict, r.technique).unwrap();
    out
}

fn main() {
    print!("{}", run_example());
}
