//! The decision procedure: depth-first search for an accepting state of the
//! transition system, preceded by the obligation shortcuts.

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::json;
use thiserror::Error;

use crate::formula::{Formula, FormulaKind};
use crate::ltl_bridge::{external_unsat, is_xw_free, ExternalLtlSolver};
use crate::normal_form::{Clauses, Label};
use crate::obligations::{accelerate_global, accelerate_off, merge_globals};
use crate::oracle::{Letter, Trace};
use crate::sat::SatBackend;
use crate::transition_system::TransitionSystem;

/// Version of the JSON result record.
pub const RESULT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Technique {
    TrivialTt,
    TrivialFf,
    OffAcceleration,
    OfgGlobal,
    OfpExternalUnsat,
    DfsAccepting,
    DfsExhausted,
}

impl Technique {
    pub const ALL: [Technique; 7] = [
        Technique::TrivialTt,
        Technique::TrivialFf,
        Technique::OffAcceleration,
        Technique::OfgGlobal,
        Technique::OfpExternalUnsat,
        Technique::DfsAccepting,
        Technique::DfsExhausted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::TrivialTt => "trivial-tt",
            Technique::TrivialFf => "trivial-ff",
            Technique::OffAcceleration => "off-acceleration",
            Technique::OfgGlobal => "ofg-global",
            Technique::OfpExternalUnsat => "ofp-external-unsat",
            Technique::DfsAccepting => "dfs-accepting",
            Technique::DfsExhausted => "dfs-exhausted",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub states_expanded: usize,
    pub clauses_generated: usize,
    pub sat_calls: usize,
    /// Failed or inconclusive calls to the external LTL solver.
    pub external_failures: usize,
    pub elapsed: Duration,
}

impl Stats {
    fn absorb(&mut self, other: &Stats) {
        self.states_expanded += other.states_expanded;
        self.clauses_generated += other.clauses_generated;
        self.sat_calls += other.sat_calls;
        self.external_failures += other.external_failures;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub verdict: Verdict,
    /// Present iff the verdict is SAT.
    pub witness: Option<Trace>,
    pub technique: Technique,
    pub stats: Stats,
}

impl CheckResult {
    pub fn sat(witness: Trace, technique: Technique, stats: Stats) -> Self {
        CheckResult {
            verdict: Verdict::Sat,
            witness: Some(witness),
            technique,
            stats,
        }
    }

    pub fn unsat(technique: Technique, stats: Stats) -> Self {
        CheckResult {
            verdict: Verdict::Unsat,
            witness: None,
            technique,
            stats,
        }
    }

    pub fn is_sat(&self) -> bool {
        self.verdict == Verdict::Sat
    }

    /// Exit status in the SAT-competition convention.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Sat => 10,
            Verdict::Unsat => 20,
        }
    }

    /// The machine-readable record. Elapsed time is only included on
    /// request so that default output is byte-stable.
    pub fn to_json(&self, timing: bool) -> serde_json::Value {
        let witness: Vec<Vec<String>> = self
            .witness
            .iter()
            .flat_map(|t| {
                t.letters().iter().map(|l| {
                    l.literals(t.alphabet())
                        .iter()
                        .map(|lit| lit.to_string())
                        .collect()
                })
            })
            .collect();
        let mut stats = json!({
            "states_expanded": self.stats.states_expanded,
            "clauses_generated": self.stats.clauses_generated,
            "sat_calls": self.stats.sat_calls,
            "external_failures": self.stats.external_failures,
        });
        if timing {
            stats["elapsed_ms"] = json!(self.stats.elapsed.as_secs_f64() * 1000.0);
        }
        json!({
            "version": RESULT_VERSION,
            "verdict": self.verdict.to_string(),
            "technique": self.technique.as_str(),
            "witness": if self.witness.is_some() { json!(witness) } else { json!(null) },
            "stats": stats,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("resource limit exceeded after {states} states ({elapsed:?})")]
    ResourceLimit { states: usize, elapsed: Duration },
    #[error("cancelled")]
    Cancelled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
    pub timeout: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: 1_000_000,
            timeout: Duration::from_secs(60),
        }
    }
}

#[derive(Clone)]
pub struct CheckOptions {
    pub off: bool,
    pub ofg: bool,
    /// External LTL solver for the unsat shortcut; `None` disables it.
    pub ofp: Option<Arc<dyn ExternalLtlSolver>>,
    pub sat: SatBackend,
    pub budget: Budget,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            off: true,
            ofg: true,
            ofp: None,
            sat: SatBackend::Embedded,
            budget: Budget::default(),
            cancel: None,
        }
    }
}

impl fmt::Debug for CheckOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckOptions")
            .field("off", &self.off)
            .field("ofg", &self.ofg)
            .field("ofp", &self.ofp.is_some())
            .field("sat", &self.sat)
            .field("budget", &self.budget)
            .finish()
    }
}

/// Truth of `f` on the one-letter trace described by `label`.
pub fn models_as_last(label: &Label, f: &Formula) -> bool {
    match f.kind() {
        FormulaKind::True => true,
        FormulaKind::False => false,
        FormulaKind::Lit(l) => label.contains(*l),
        FormulaKind::And(cs) => cs.iter().all(|c| models_as_last(label, c)),
        FormulaKind::Or(cs) => cs.iter().any(|c| models_as_last(label, c)),
        FormulaKind::Next(_) => false,
        FormulaKind::WeakNext(_) => true,
        FormulaKind::Until(_, r) | FormulaKind::Release(_, r) => models_as_last(label, r),
    }
}

fn accepting_label(state: &Formula, clauses: &Clauses) -> Option<Label> {
    clauses
        .iter()
        .find(|c| models_as_last(&c.label, state))
        .map(|c| c.label.clone())
}

/// Some outgoing label that, read as the last letter, satisfies `s`.
pub fn is_accepting(s: &Formula) -> Option<Label> {
    let mut ts = TransitionSystem::new(s.clone());
    let clauses = ts.successors(s);
    accepting_label(s, &clauses)
}

fn single_letter(f: &Formula) -> Trace {
    Trace::new(f.atoms(), vec![Letter::default()])
}

struct Frame {
    clauses: Clauses,
    next: usize,
}

/// Plain search, no shortcuts: SAT iff an accepting state is reachable.
pub fn check_dfs(f: &Formula, options: &CheckOptions) -> Result<CheckResult, CheckError> {
    let start = Instant::now();
    let mut stats = Stats::default();
    if f.is_tt() {
        stats.elapsed = start.elapsed();
        return Ok(CheckResult::sat(single_letter(f), Technique::TrivialTt, stats));
    }
    let alphabet = f.atoms();
    let mut ts = TransitionSystem::new(f.clone());
    let mut visited: HashSet<u32> = HashSet::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut path: Vec<Label> = Vec::new();
    let mut pending = Some(f.clone());

    loop {
        if let Some(state) = pending.take() {
            visited.insert(state.id());
            if options.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
                return Err(CheckError::Cancelled);
            }
            if stats.states_expanded >= options.budget.max_states
                || start.elapsed() > options.budget.timeout
            {
                return Err(CheckError::ResourceLimit {
                    states: stats.states_expanded,
                    elapsed: start.elapsed(),
                });
            }
            let clauses = ts.successors(&state);
            stats.states_expanded += 1;
            stats.clauses_generated += clauses.len();
            if let Some(last) = accepting_label(&state, &clauses) {
                let letters = path
                    .iter()
                    .chain(std::iter::once(&last))
                    .map(|l| Letter::new(l.complete(&alphabet)))
                    .collect();
                stats.elapsed = start.elapsed();
                return Ok(CheckResult::sat(
                    Trace::new(alphabet, letters),
                    Technique::DfsAccepting,
                    stats,
                ));
            }
            stack.push(Frame {
                clauses,
                next: 0,
            });
        }
        let Some(top) = stack.last_mut() else {
            break;
        };
        if top.next == top.clauses.len() {
            stack.pop();
            path.pop();
            continue;
        }
        let clause = top.clauses[top.next].clone();
        top.next += 1;
        if visited.contains(&clause.next_state.id()) {
            continue;
        }
        // The path holds the labels leading to the state about to be expanded.
        path.truncate(stack.len() - 1);
        path.push(clause.label);
        pending = Some(clause.next_state);
    }
    debug_assert!(ts.expanded_count() == stats.states_expanded);
    stats.elapsed = start.elapsed();
    Ok(CheckResult::unsat(Technique::DfsExhausted, stats))
}

/// The full pipeline: trivia, global shortcut, `off` shortcut, external
/// unsat shortcut, then search.
pub fn check(f: &Formula, options: &CheckOptions) -> Result<CheckResult, CheckError> {
    let start = Instant::now();
    if f.is_tt() {
        return check_dfs(f, options);
    }
    if f.is_ff() {
        return Ok(CheckResult::unsat(
            Technique::TrivialFf,
            Stats {
                elapsed: start.elapsed(),
                ..Stats::default()
            },
        ));
    }
    let mut stats = Stats::default();
    if options.ofg {
        if let Some(mut r) = accelerate_global(&merge_globals(f), &options.sat) {
            r.stats.elapsed = start.elapsed();
            return Ok(r);
        }
    }
    if options.off {
        stats.sat_calls += 1;
        if let Some(mut r) = accelerate_off(f, &options.sat) {
            r.stats.elapsed = start.elapsed();
            return Ok(r);
        }
    }
    if let Some(solver) = &options.ofp {
        if is_xw_free(f) {
            match external_unsat(f, solver.as_ref()) {
                Ok(Some(_)) => {
                    stats.elapsed = start.elapsed();
                    return Ok(CheckResult::unsat(Technique::OfpExternalUnsat, stats));
                }
                Ok(None) => {}
                Err(_) => stats.external_failures += 1,
            }
        }
    }
    let mut r = check_dfs(f, options)?;
    r.stats.absorb(&stats);
    r.stats.elapsed = start.elapsed();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Atom, Literal};
    use crate::oracle::evaluate;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn label(lits: &[(&str, bool)]) -> Label {
        Label::new(lits.iter().map(|&(a, b)| Literal::new(Atom::new(a), b))).unwrap()
    }

    fn dfs(s: &str) -> CheckResult {
        check_dfs(&p(s), &CheckOptions::default()).unwrap()
    }

    fn full(s: &str) -> CheckResult {
        check(&p(s), &CheckOptions::default()).unwrap()
    }

    #[test]
    fn last_position_rules() {
        assert!(models_as_last(&label(&[("b", true)]), &p("G (a U b)")));
        assert!(!models_as_last(&label(&[("a", true)]), &p("X (a | !a)")));
        assert!(models_as_last(&Label::empty(), &p("N false")));
        assert!(!models_as_last(&label(&[("a", true)]), &p("G F a & G F !a")));
    }

    #[test]
    fn accepting_states() {
        assert_eq!(is_accepting(&p("G (a U b)")), Some(label(&[("b", true)])));
        assert_eq!(is_accepting(&p("G F a & G F !a")), None);
        assert_eq!(is_accepting(&Formula::tt()), Some(Label::empty()));
    }

    #[test]
    fn dfs_verdicts() {
        let r = dfs("G (a U b)");
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.technique, Technique::DfsAccepting);
        assert_eq!(r.witness.unwrap(), Trace::parse("a=0,b=1").unwrap());

        for s in ["G F a & G F !a", "X false", "G X a"] {
            let r = dfs(s);
            assert_eq!(r.verdict, Verdict::Unsat, "{s}");
            assert_eq!(r.technique, Technique::DfsExhausted);
            assert!(r.witness.is_none());
        }

        let r = dfs("N false");
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.witness.unwrap().len(), 1);
    }

    #[test]
    fn dfs_witness_follows_the_path() {
        let f = p("X X a & G !b");
        let r = check_dfs(&f, &CheckOptions::default()).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 3);
        assert!(evaluate(&w, &f).unwrap());
    }

    #[test]
    fn dfs_witness_after_backtracking() {
        // The first branch explored is a dead end.
        let f = p("(X false | X X a) & F b");
        let r = check_dfs(&f, &CheckOptions::default()).unwrap();
        assert!(evaluate(&r.witness.unwrap(), &f).unwrap());
    }

    #[test]
    fn pipeline_techniques() {
        let r = full("a & G F !a");
        assert_eq!(r.verdict, Verdict::Sat);
        assert_ne!(r.technique, Technique::OffAcceleration);

        let r = full("G N a");
        assert_eq!((r.verdict, r.technique), (Verdict::Sat, Technique::OfgGlobal));
        let r = full("G X a");
        assert_eq!((r.verdict, r.technique), (Verdict::Unsat, Technique::OfgGlobal));
        let r = full("a U b");
        assert_eq!((r.verdict, r.technique), (Verdict::Sat, Technique::OffAcceleration));
        let r = full("false");
        assert_eq!((r.verdict, r.technique), (Verdict::Unsat, Technique::TrivialFf));
        let r = full("true");
        assert_eq!((r.verdict, r.technique), (Verdict::Sat, Technique::TrivialTt));
    }

    #[test]
    fn conjoined_globals_use_ofg() {
        let r = full("G a & G (X b)");
        assert_eq!((r.verdict, r.technique), (Verdict::Unsat, Technique::OfgGlobal));
        assert_eq!(r.stats.sat_calls, 1);
        assert_eq!(r.stats.states_expanded, 0);
    }

    #[test]
    fn flags_switch_stages_off() {
        let opts = CheckOptions {
            off: false,
            ofg: false,
            ..CheckOptions::default()
        };
        let r = check(&p("G X a"), &opts).unwrap();
        assert_eq!(r.technique, Technique::DfsExhausted);
        let r = check(&p("a U b"), &opts).unwrap();
        assert_eq!(r.technique, Technique::DfsAccepting);
        assert_eq!(r.stats.sat_calls, 0);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let opts = CheckOptions {
            budget: Budget {
                max_states: 1,
                timeout: Duration::from_secs(60),
            },
            ..CheckOptions::default()
        };
        let err = check_dfs(&p("G F a & G F !a"), &opts).unwrap_err();
        assert!(matches!(err, CheckError::ResourceLimit { states: 1, .. }));
    }

    #[test]
    fn cancellation() {
        let flag = Arc::new(AtomicBool::new(true));
        let opts = CheckOptions {
            cancel: Some(flag),
            ..CheckOptions::default()
        };
        assert_eq!(check_dfs(&p("G F a"), &opts).unwrap_err(), CheckError::Cancelled);
    }

    #[test]
    fn json_record() {
        let r = dfs("G (a U b)");
        let j = r.to_json(false);
        assert_eq!(j["verdict"], "SAT");
        assert_eq!(j["technique"], "dfs-accepting");
        assert_eq!(j["witness"], json!([["!a", "b"]]));
        assert!(j["stats"].get("elapsed_ms").is_none());
        assert!(r.to_json(true)["stats"].get("elapsed_ms").is_some());
        assert_eq!(dfs("X false").to_json(false)["witness"], json!(null));
    }
}
