//! Propositional obligation formulas and the two SAT shortcuts built on them.
//!
//! `off` over-approximates what a one-letter-repeated trace must satisfy:
//! a model `A` of `off(φ)` yields a model `A^k` of `φ`. For `G ψ` the global
//! obligation `ofg(ψ)` is exact: `G ψ` is satisfiable iff `ofg(ψ)` is.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use crate::checker::{CheckResult, Stats, Technique, Verdict};
use crate::formula::{Atom, Formula, FormulaKind, PropositionalFormula};
use crate::oracle::{evaluate, Letter, Trace};
use crate::sat::{Assignment, SatBackend, SolveResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObligationSet {
    pub off: PropositionalFormula,
    pub ofr: PropositionalFormula,
    pub ofg: PropositionalFormula,
}

/// All three obligation formulas of `f`, in one bottom-up pass.
pub fn obligations(f: &Formula) -> ObligationSet {
    let mut memo = HashMap::new();
    let [off, ofr, ofg] = triple(f, &mut memo);
    let wrap = |g: Formula| PropositionalFormula::new(g).expect("obligations are propositional");
    ObligationSet {
        off: wrap(off),
        ofr: wrap(ofr),
        ofg: wrap(ofg),
    }
}

fn triple(f: &Formula, memo: &mut HashMap<u32, [Formula; 3]>) -> [Formula; 3] {
    if let Some(t) = memo.get(&f.id()) {
        return t.clone();
    }
    let out = match f.kind() {
        FormulaKind::True | FormulaKind::False | FormulaKind::Lit(_) => {
            [f.clone(), f.clone(), f.clone()]
        }
        FormulaKind::And(cs) | FormulaKind::Or(cs) => {
            let parts: Vec<[Formula; 3]> = cs.iter().map(|c| triple(c, memo)).collect();
            let join = |i: usize| {
                let items = parts.iter().map(|p| p[i].clone());
                if matches!(f.kind(), FormulaKind::And(_)) {
                    Formula::and(items)
                } else {
                    Formula::or(items)
                }
            };
            [join(0), join(1), join(2)]
        }
        FormulaKind::Next(g) => [triple(g, memo)[0].clone(), Formula::ff(), Formula::ff()],
        FormulaKind::WeakNext(g) => [triple(g, memo)[0].clone(), Formula::ff(), Formula::tt()],
        FormulaKind::Until(_, r) => triple(r, memo),
        FormulaKind::Release(_, r) => {
            let [_, ofr, ofg] = triple(r, memo);
            [ofr.clone(), ofr, ofg]
        }
    };
    memo.insert(f.id(), out.clone());
    out
}

/// Rewrites a conjunction whose every conjunct is global into one `G`.
/// Anything else is returned unchanged.
pub fn merge_globals(f: &Formula) -> Formula {
    let FormulaKind::And(cs) = f.kind() else {
        return f.clone();
    };
    let bodies: Option<Vec<Formula>> = cs.iter().map(|c| c.as_globally().cloned()).collect();
    match bodies {
        Some(bodies) => Formula::globally(Formula::and(bodies)),
        None => f.clone(),
    }
}

fn letter_from(assignment: &Assignment) -> Letter {
    Letter::new(assignment.iter().filter(|(_, &v)| v).map(|(&a, _)| a))
}

fn restrict(letter: Letter, alphabet: &BTreeSet<Atom>) -> Letter {
    Letter::new(letter.true_atoms().intersection(alphabet).copied())
}

/// If `off(f)` is satisfiable, a validated model `A^k` with `k <= |f| + 1`.
/// `None` means no conclusion.
pub fn accelerate_off(f: &Formula, backend: &SatBackend) -> Option<CheckResult> {
    let start = Instant::now();
    let SolveResult::Sat(assignment) = backend.solve(&obligations(f).off) else {
        return None;
    };
    let alphabet = f.atoms();
    let letter = restrict(letter_from(&assignment), &alphabet);
    let witness = (1..=f.size() + 1)
        .map(|k| Trace::new(alphabet.clone(), vec![letter.clone(); k]))
        .find(|t| evaluate(t, f).unwrap_or(false))?;
    Some(CheckResult::sat(
        witness,
        Technique::OffAcceleration,
        Stats {
            sat_calls: 1,
            elapsed: start.elapsed(),
            ..Stats::default()
        },
    ))
}

/// Decides `G ψ` exactly through `ofg(ψ)`; `None` if `f` is not global.
pub fn accelerate_global(f: &Formula, backend: &SatBackend) -> Option<CheckResult> {
    let start = Instant::now();
    let body = f.as_globally()?;
    let stats = |elapsed| Stats {
        sat_calls: 1,
        elapsed,
        ..Stats::default()
    };
    Some(match backend.solve(&obligations(body).ofg) {
        SolveResult::Sat(assignment) => {
            let alphabet = f.atoms();
            let letter = restrict(letter_from(&assignment), &alphabet);
            CheckResult::sat(
                Trace::new(alphabet, vec![letter]),
                Technique::OfgGlobal,
                stats(start.elapsed()),
            )
        }
        SolveResult::Unsat => CheckResult {
            verdict: Verdict::Unsat,
            witness: None,
            technique: Technique::OfgGlobal,
            stats: stats(start.elapsed()),
        },
    })
}
