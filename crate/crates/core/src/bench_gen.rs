//! Seeded formula generators and a parallel suite runner.
//!
//! Random conjunctions instantiate small patterns over a shared atom pool
//! `p0 .. pk`. Pattern placeholders are the atoms of the pattern text.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::checker::{check, CheckError, CheckOptions, Technique};
use crate::formula::Formula;
use crate::obligations::merge_globals;
use crate::syntax::{formula_from_file_text, parse_expr, to_nnf, Expr, ParseError};

pub const DEFAULT_POOL: [&str; 8] = [
    "G p",
    "F p",
    "p U q",
    "G(p -> F q)",
    "G F p",
    "F G p",
    "G(p -> X q)",
    "p R q",
];

pub const GLOBAL_POOL: [&str; 6] = [
    "G p",
    "G F p",
    "G(p -> F q)",
    "G(p -> X q)",
    "G(p U q)",
    "G(p -> N q)",
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("pattern `{pattern}`: {source}")]
    Pattern { pattern: String, source: ParseError },
    #[error("global pattern `{0}` is not of the form G(..)")]
    NotGlobal(String),
    #[error("{path}: {source}")]
    Formula { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Parses pattern texts.
pub fn pattern_pool(texts: &[&str]) -> Result<Vec<Expr>, BenchError> {
    texts
        .iter()
        .map(|t| {
            parse_expr(t).map_err(|source| BenchError::Pattern {
                pattern: t.to_string(),
                source,
            })
        })
        .collect()
}

pub fn default_pool() -> Vec<Expr> {
    pattern_pool(&DEFAULT_POOL).expect("built-in patterns parse")
}

pub fn global_pool() -> Vec<Expr> {
    pattern_pool(&GLOBAL_POOL).expect("built-in patterns parse")
}

fn instantiate(pattern: &Expr, atoms: usize, rng: &mut ChaCha8Rng) -> Expr {
    let rng = RefCell::new(rng);
    let chosen: RefCell<HashMap<String, String>> = RefCell::default();
    pattern.substitute(&|name| {
        let mut chosen = chosen.borrow_mut();
        let pick = chosen
            .entry(name.to_string())
            .or_insert_with(|| format!("p{}", rng.borrow_mut().gen_range(0..atoms)));
        Some(pick.clone())
    })
}

/// Conjunction of `n` patterns drawn from `pool`, atoms drawn with
/// replacement from `max(n, 2)` fresh names.
pub fn random_conjunction(n: usize, seed: u64, pool: &[Expr]) -> Formula {
    assert!(n >= 1 && !pool.is_empty());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms = n.max(2);
    let parts: Vec<Formula> = (0..n)
        .map(|_| {
            let pattern = &pool[rng.gen_range(0..pool.len())];
            to_nnf(&instantiate(pattern, atoms, &mut rng))
        })
        .collect();
    Formula::and(parts)
}

/// Like [`random_conjunction`] over global patterns, merged into one `G`.
pub fn global_random_conjunction(n: usize, seed: u64, pool: &[Expr]) -> Result<Formula, BenchError> {
    for p in pool {
        if to_nnf(p).as_globally().is_none() {
            return Err(BenchError::NotGlobal(p.to_string()));
        }
    }
    Ok(merge_globals(&random_conjunction(n, seed, pool)))
}

/// A random surface formula with at most `max_nodes` nodes over `atoms`,
/// negation and derived operators included.
pub fn random_expr(rng: &mut impl Rng, atoms: &[&str], max_nodes: usize) -> Expr {
    let size = rng.gen_range(1..=max_nodes.max(1));
    sized_expr(rng, atoms, size)
}

fn sized_expr(rng: &mut impl Rng, atoms: &[&str], size: usize) -> Expr {
    if size == 1 {
        return match rng.gen_range(0..10) {
            0 => Expr::True,
            1 => Expr::False,
            _ => Expr::atom(atoms[rng.gen_range(0..atoms.len())]),
        };
    }
    if size == 2 || rng.gen_bool(0.4) {
        let c = Box::new(sized_expr(rng, atoms, size - 1));
        return match rng.gen_range(0..5) {
            0 => Expr::Not(c),
            1 => Expr::Next(c),
            2 => Expr::WeakNext(c),
            3 => Expr::Globally(c),
            _ => Expr::Eventually(c),
        };
    }
    let left = rng.gen_range(1..=size - 2);
    let l = Box::new(sized_expr(rng, atoms, left));
    let r = Box::new(sized_expr(rng, atoms, size - 1 - left));
    match rng.gen_range(0..6) {
        0 => Expr::And(l, r),
        1 => Expr::Or(l, r),
        2 => Expr::Until(l, r),
        3 => Expr::Release(l, r),
        4 => Expr::Implies(l, r),
        _ => Expr::Iff(l, r),
    }
}

/// `count` seeded random formulas with at most three atoms and seven nodes.
pub fn corpus(seed: u64, count: usize) -> Vec<Expr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_expr(&mut rng, &["a", "b", "c"], 7))
        .collect()
}

#[derive(Clone, Debug)]
pub struct Case {
    pub id: String,
    pub n: Option<usize>,
    pub formula: Formula,
}

/// Reads every regular file in `dir`, in name order, as one formula.
pub fn load_dir(dir: &Path) -> Result<Vec<Case>, BenchError> {
    let io = |source| BenchError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let path = p.display().to_string();
            let text = std::fs::read_to_string(&p).map_err(|source| BenchError::Io {
                path: path.clone(),
                source,
            })?;
            let formula = formula_from_file_text(&text)
                .map_err(|source| BenchError::Formula { path, source })?;
            Ok(Case {
                id: p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                n: header_n(&text),
                formula,
            })
        })
        .collect()
}

/// The `n` recorded by `gen` in a `# n=.. seed=..` header line.
fn header_n(text: &str) -> Option<usize> {
    text.lines()
        .find_map(|l| l.trim().strip_prefix("# n="))
        .and_then(|rest| rest.split_whitespace().next()?.parse().ok())
}

/// File text written by `gen`: a header comment and the formula.
pub fn case_file_text(n: usize, seed: u64, f: &Formula) -> String {
    format!("# n={n} seed={seed}\n{f}\n")
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub check: CheckOptions,
    pub timeout: Duration,
    pub jobs: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            check: CheckOptions::default(),
            timeout: Duration::from_secs(60),
            jobs: 1,
        }
    }
}

pub const RESOURCE_LIMIT: &str = "resource-limit";

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub id: String,
    pub n: Option<usize>,
    /// `SAT`, `UNSAT`, or `UNKNOWN` when the budget ran out.
    pub verdict: String,
    pub technique: String,
    pub states: usize,
    pub millis: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
    /// Cases per technique, `resource-limit` included; sums to the case count.
    pub techniques: IndexMap<String, usize>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,n,verdict,technique,states,millis\n");
        for r in &self.rows {
            let n = r.n.map(|n| n.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{:.3}",
                r.id, n, r.verdict, r.technique, r.states, r.millis
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn run_case(case: &Case, options: &SuiteOptions) -> Row {
    let mut check_options = options.check.clone();
    check_options.budget.timeout = options.timeout;
    let start = Instant::now();
    let outcome = check(&case.formula, &check_options);
    let millis = start.elapsed().as_secs_f64() * 1000.0;
    let (verdict, technique, states) = match outcome {
        Ok(r) => (r.verdict.to_string(), r.technique.to_string(), r.stats.states_expanded),
        Err(CheckError::ResourceLimit { states, .. }) => ("UNKNOWN".into(), RESOURCE_LIMIT.into(), states),
        Err(CheckError::Cancelled) => ("UNKNOWN".into(), RESOURCE_LIMIT.into(), 0),
    };
    Row {
        id: case.id.clone(),
        n: case.n,
        verdict,
        technique,
        states,
        millis,
    }
}

/// Checks every case; rows come back in input order whatever `jobs` is.
pub fn run_suite(cases: &[Case], options: &SuiteOptions) -> Report {
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Row>>> = Mutex::new(vec![None; cases.len()]);
    std::thread::scope(|s| {
        for _ in 0..options.jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(case) = cases.get(i) else { break };
                let row = run_case(case, options);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    let rows: Vec<Row> = rows.into_inner().unwrap().into_iter().map(|r| r.expect("every case ran")).collect();
    let mut techniques: IndexMap<String, usize> = Technique::ALL
        .iter()
        .map(|t| (t.to_string(), 0))
        .chain([(RESOURCE_LIMIT.to_string(), 0)])
        .collect();
    for r in &rows {
        *techniques.get_mut(&r.technique).expect("known technique") += 1;
    }
    Report { rows, techniques }
}
