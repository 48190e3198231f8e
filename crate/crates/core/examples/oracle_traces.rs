// Evaluate traces directly against the semantics and search for the
// first model by length.
//
//     cargo run --example oracle_traces

use std::collections::BTreeSet;
use std::fmt::Write as _;

use ltlf_check::oracle::{bounded_search, bounded_search_symbolic, evaluate, Trace};
use ltlf_check::{parse, Atom};

pub fn run_example() -> String {
    let mut out = String::new();
    let trace = Trace::parse("a=1,b=0; a=0,b=1").unwrap();
    for text in ["a U b", "X b", "N false", "G F a & G F !a"] {
        let holds = evaluate(&trace, &parse(text).unwrap()).unwrap();
        writeln!(out, "[{trace}] |= {text}: {holds}").unwrap();
    }

    let ab: BTreeSet<Atom> = [Atom::new("a"), Atom::new("b")].into();
    let f = parse("X X (a & !b) & G (a -> X b | N false)").unwrap();
    let first = bounded_search(&f, &ab, 4);
    assert_eq!(first, bounded_search_symbolic(&f, &ab, 4));
    match first {
        Some(t) => writeln!(out, "first model of {f}: {t}").unwrap(),
        None => writeln!(out, "{f} has no model up to length 4").unwrap(),
    }
    out
}

fn main() {
    print!("{}", run_example());
}
