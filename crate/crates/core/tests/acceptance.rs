//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{abc, all_traces, corpus_formulas, MockLtlSolver};
use ltlf_check::bench_gen::{corpus, global_pool, global_random_conjunction};
use ltlf_check::checker::{models_as_last, Stats};
use ltlf_check::ltl_bridge::{is_xw_free, translate_to_ltl};
use ltlf_check::normal_form::NormalFormCache;
use ltlf_check::obligations::obligations;
use ltlf_check::oracle::{
    bounded_search, bounded_search_symbolic, evaluate, lasso_evaluate_single, letters_in_order, Trace,
};
use ltlf_check::sat::solve;
use ltlf_check::transition_system::TransitionSystem;
use ltlf_check::{check, check_dfs, parse, to_nnf, CheckOptions, CheckResult, Formula, Technique, Verdict};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    match failures.first() {
        None => Outcome {
            pass: true,
            detail: summary,
        },
        Some(first) => Outcome {
            pass: false,
            detail: format!("{summary}; {} failure(s), first: {first}", failures.len()),
        },
    }
}

fn dfs(f: &Formula) -> CheckResult {
    check_dfs(f, &CheckOptions::default()).expect("corpus formulas fit the default budget")
}

fn known_verdicts() -> Outcome {
    let start = Instant::now();
    let cases = [
        ("G (a U b)", Verdict::Sat),
        ("G F a & G F !a", Verdict::Unsat),
        ("X false", Verdict::Unsat),
        ("N false", Verdict::Sat),
        ("G X a", Verdict::Unsat),
        ("G N a", Verdict::Sat),
        ("a & G F !a", Verdict::Sat),
    ];
    let mut failures = Vec::new();
    for (text, expected) in cases {
        let f = parse(text).unwrap();
        let r = check(&f, &CheckOptions::default()).unwrap();
        if r.verdict != expected {
            failures.push(format!("{text}: got {}", r.verdict));
        }
        if let Some(w) = &r.witness {
            if !evaluate(w, &f).unwrap() {
                failures.push(format!("{text}: witness {w} fails"));
            }
        }
        if text == "a & G F !a" && r.technique == Technique::OffAcceleration {
            failures.push(format!("{text}: decided by off"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(&failures, format!("{} formulas in {elapsed:?}", cases.len()))
}

fn nf_characterization(formulas: &[Formula]) -> Outcome {
    let start = Instant::now();
    let traces = all_traces(&abc(), 3);
    let cache = NormalFormCache::new();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for f in formulas {
        let clauses = cache.clauses(f);
        for t in &traces {
            let first = &t.letters()[0];
            let enabled = clauses
                .iter()
                .filter(|c| c.label.literals().iter().all(|&l| first.holds(l)));
            let via_nf = if t.len() == 1 {
                enabled.clone().any(|c| models_as_last(&c.label, f))
            } else {
                let rest = t.suffix(1);
                enabled.clone().any(|c| evaluate(&rest, &c.next_state).unwrap())
            };
            checked += 1;
            if via_nf != evaluate(t, f).unwrap() {
                failures.push(format!("{f} on {t}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(300) {
        failures.push(format!("took {elapsed:?}"));
    }
    outcome(&failures, format!("{checked} (formula, trace) pairs in {elapsed:?}"))
}

fn search_bound(r: &CheckResult) -> usize {
    // Shortcut verdicts expand nothing; their witnesses still bound the search.
    let witness = r.witness.as_ref().map_or(0, Trace::len);
    (r.stats.states_expanded + 1).max(witness)
}

fn checker_vs_oracle(formulas: &[Formula]) -> Outcome {
    let mut failures = Vec::new();
    let mut enumerated = 0;
    for f in formulas {
        let r = check(f, &CheckOptions::default()).unwrap();
        let atoms = f.atoms();
        let bound = search_bound(&r);
        let found = bounded_search_symbolic(f, &atoms, bound).is_some();
        // The enumerative search is run where it is affordable.
        if (1usize << atoms.len()).checked_pow(bound as u32).is_some_and(|n| n <= 50_000) {
            enumerated += 1;
            if bounded_search(f, &atoms, bound).is_some() != found {
                failures.push(format!("{f}: the two searches disagree at bound {bound}"));
            }
        }
        if r.is_sat() != found {
            failures.push(format!("{f}: {} but search says {found} at bound {bound}", r.verdict));
        }
        if let Some(w) = &r.witness {
            if !evaluate(w, f).unwrap() {
                failures.push(format!("{f}: witness {w} fails"));
            }
        }
    }
    outcome(
        &failures,
        format!("{} formulas, {enumerated} also enumerated", formulas.len()),
    )
}

fn off_soundness(formulas: &[Formula]) -> Outcome {
    let mut failures = Vec::new();
    let mut sat_off = 0;
    for f in formulas {
        if solve(&obligations(f).off).is_sat() {
            sat_off += 1;
            if !dfs(f).is_sat() {
                failures.push(f.to_string());
            }
        }
    }
    outcome(&failures, format!("{sat_off} formulas with satisfiable off"))
}

fn global_formulas() -> Vec<Formula> {
    let bodies = corpus(0x0fa11, 250);
    let pool = global_pool();
    let mut out: Vec<Formula> = bodies.iter().map(|e| Formula::globally(to_nnf(e))).collect();
    out.extend((0..250u64).map(|seed| {
        global_random_conjunction(1 + (seed % 4) as usize, seed, &pool).unwrap()
    }));
    out
}

fn ofg_exactness() -> Outcome {
    let formulas = global_formulas();
    let mut failures = Vec::new();
    let mut sat = 0;
    for g in &formulas {
        let body = g.as_globally().expect("global");
        let via_ofg = solve(&obligations(body).ofg).is_sat();
        let via_dfs = dfs(g).is_sat();
        if via_ofg != via_dfs {
            failures.push(format!("{g}: ofg {via_ofg}, search {via_dfs}"));
        }
        let r = check(g, &CheckOptions::default()).unwrap();
        sat += usize::from(r.is_sat());
        let Stats {
            sat_calls,
            states_expanded,
            ..
        } = r.stats;
        if r.technique != Technique::OfgGlobal || sat_calls != 1 || states_expanded != 0 {
            failures.push(format!(
                "{g}: technique {}, {sat_calls} SAT calls, {states_expanded} states",
                r.technique
            ));
        }
        if r.is_sat() != via_dfs {
            failures.push(format!("{g}: pipeline says {}", r.verdict));
        }
        if let Some(w) = &r.witness {
            if w.len() != 1 || !evaluate(w, g).unwrap() {
                failures.push(format!("{g}: witness {w} invalid"));
            }
        }
    }
    outcome(&failures, format!("{} global formulas, {sat} SAT", formulas.len()))
}

fn lasso_property(formulas: &[Formula]) -> Outcome {
    let letters = letters_in_order(&abc());
    let mut failures = Vec::new();
    let mut pairs = 0;
    'outer: for f in formulas.iter().filter(|f| is_xw_free(f)) {
        for a in &letters {
            if pairs == 1000 {
                break 'outer;
            }
            let trace = Trace::new(abc(), vec![a.clone()]);
            if evaluate(&trace, f).unwrap() {
                pairs += 1;
                if !lasso_evaluate_single(a, f).unwrap() {
                    failures.push(format!("{f} on {a:?}"));
                }
            }
        }
    }
    if pairs < 1000 {
        failures.push(format!("only {pairs} pairs available"));
    }
    outcome(&failures, format!("{pairs} pairs"))
}

fn state_bound(formulas: &[Formula]) -> Outcome {
    let mut failures = Vec::new();
    let mut largest = 0;
    for f in formulas {
        let mut ts = TransitionSystem::new(f.clone());
        assert!(ts.expand_all(1 << 20));
        let cl = f.closure().len();
        largest = largest.max(ts.state_count());
        if cl < 63 && ts.state_count() as u64 > 1u64 << cl {
            failures.push(format!("{f}: {} states, closure {cl}", ts.state_count()));
        }
    }
    outcome(&failures, format!("largest system has {largest} states"))
}

fn translation(formulas: &[Formula]) -> Outcome {
    let mut failures = Vec::new();
    let goldens = [
        ("p", "Tail & (Tail U G(!Tail)) & p"),
        ("X a", "Tail & (Tail U G(!Tail)) & X(Tail & a)"),
        ("a U b", "Tail & (Tail U G(!Tail)) & (a U (Tail & b))"),
    ];
    for (input, expected) in goldens {
        let got = translate_to_ltl(&parse(input).unwrap()).to_string();
        if got != expected {
            failures.push(format!("{input}: {got}"));
        }
    }
    let mut worst = 0.0f64;
    for f in formulas {
        let n = f.size();
        let out = translate_to_ltl(f).node_count();
        worst = worst.max(out as f64 / n as f64);
        if out > 4 * n + 4 {
            failures.push(format!("{f}: {out} nodes from {n}"));
        }
    }
    outcome(&failures, format!("3 goldens, worst ratio {worst:.2}"))
}

fn pipeline_agreement(formulas: &[Formula]) -> Outcome {
    let mut failures = Vec::new();
    let baseline: Vec<bool> = formulas.iter().map(|f| dfs(f).is_sat()).collect();
    for combo in 0..8u8 {
        let options = CheckOptions {
            off: combo & 1 != 0,
            ofg: combo & 2 != 0,
            ofp: (combo & 4 != 0).then(|| Arc::new(MockLtlSolver) as _),
            ..CheckOptions::default()
        };
        for (f, &expected) in formulas.iter().zip(&baseline) {
            let r = check(f, &options).unwrap();
            if r.is_sat() != expected {
                failures.push(format!("{f} with {options:?}: {}", r.verdict));
            }
        }
    }
    outcome(&failures, format!("{} formulas x 8 flag combinations", formulas.len()))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() {
    let formulas = corpus_formulas();
    let criteria: [Criterion; 9] = [
        ("verdicts on known formulas", Box::new(known_verdicts)),
        ("normal form characterization", Box::new(|| nf_characterization(&formulas))),
        ("checker agrees with the oracle", Box::new(|| checker_vs_oracle(&formulas))),
        ("off shortcut soundness", Box::new(|| off_soundness(&formulas))),
        ("ofg decides global formulas", Box::new(ofg_exactness)),
        ("one-letter lasso property", Box::new(|| lasso_property(&formulas))),
        ("state bound", Box::new(|| state_bound(&formulas))),
        ("LTL translation", Box::new(|| translation(&formulas))),
        ("pipeline agreement", Box::new(|| pipeline_agreement(&formulas))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "criterion {}: {} - {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
