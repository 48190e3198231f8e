// Generate random conjunctions of temporal patterns and run them as a
// suite, counting which technique decided each case.
//
//     cargo run --release --example benchmark_suite

use std::fmt::Write as _;

use ltlf_check::bench_gen::{
    default_pool, global_pool, global_random_conjunction, random_conjunction, run_suite, Case,
    SuiteOptions,
};

pub fn run_example() -> String {
    let (pool, globals) = (default_pool(), global_pool());
    let mut cases = Vec::new();
    for n in 1..=6 {
        for seed in 0..10 {
            cases.push(Case {
                id: format!("random-n{n}-s{seed}"),
                n: Some(n),
                formula: random_conjunction(n, seed, &pool),
            });
            cases.push(Case {
                id: format!("global-n{n}-s{seed}"),
                n: Some(n),
                formula: global_random_conjunction(n, seed, &globals).unwrap(),
            });
        }
    }
    let report = run_suite(&cases, &SuiteOptions { jobs: 4, ..SuiteOptions::default() });
    let mut out = String::new();
    writeln!(out, "{} cases", report.rows.len()).unwrap();
    for (technique, count) in &report.techniques {
        if *count > 0 {
            writeln!(out, "{technique:<20} {count}").unwrap();
        }
    }
    out
}

fn main() {
    print!("{}", run_example());
}
