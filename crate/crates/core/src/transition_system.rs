//! Lazily expanded transition system of a formula.
//!
//! States are canonical formulas; `s --label--> t` iff `(label, t)` is a
//! clause of the normal form of `s`. Expansion happens on demand, state by
//! state, so a search can stop as soon as it has what it needs.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;

use crate::formula::{Atom, Formula};
use crate::normal_form::{Clauses, Label, NormalFormCache};
use crate::oracle::{Letter, Trace};

pub struct TransitionSystem {
    initial: Formula,
    cache: Arc<NormalFormCache>,
    // Discovery order; `None` until the state is expanded.
    states: IndexMap<Formula, Option<Clauses>>,
}

/// One step of a run: the state left and the label taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub state: Formula,
    pub label: Label,
}

/// A run over a trace: `steps[i]` is taken on letter `i`; `last` is the state
/// reached after the final letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub steps: Vec<Step>,
    pub last: Formula,
}

impl TransitionSystem {
    pub fn new(initial: Formula) -> Self {
        Self::with_cache(initial, Arc::new(NormalFormCache::new()))
    }

    pub fn with_cache(initial: Formula, cache: Arc<NormalFormCache>) -> Self {
        let mut states = IndexMap::new();
        states.insert(initial.clone(), None);
        TransitionSystem {
            initial,
            cache,
            states,
        }
    }

    pub fn initial(&self) -> &Formula {
        &self.initial
    }

    /// States discovered so far, in discovery order.
    pub fn states(&self) -> impl Iterator<Item = &Formula> {
        self.states.keys()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn expanded_count(&self) -> usize {
        self.states.values().filter(|v| v.is_some()).count()
    }

    pub fn is_expanded(&self, s: &Formula) -> bool {
        matches!(self.states.get(s), Some(Some(_)))
    }

    /// Outgoing edges of `s`, expanding it on first request. Targets are
    /// registered as discovered states.
    pub fn successors(&mut self, s: &Formula) -> Clauses {
        if let Some(Some(c)) = self.states.get(s) {
            return c.clone();
        }
        let clauses = self.cache.clauses(s);
        for c in clauses.iter() {
            self.states.entry(c.next_state.clone()).or_insert(None);
        }
        self.states.insert(s.clone(), Some(clauses.clone()));
        clauses
    }

    /// Edges of an already expanded state.
    pub fn edges(&self, s: &Formula) -> Option<&Clauses> {
        self.states.get(s).and_then(Option::as_ref)
    }

    /// Expands every reachable state; stops early (returning false) once
    /// more than `limit` states have been expanded.
    pub fn expand_all(&mut self, limit: usize) -> bool {
        let mut queue: VecDeque<Formula> = VecDeque::from([self.initial.clone()]);
        let mut seen: HashSet<Formula> = HashSet::from([self.initial.clone()]);
        let mut expanded = 0;
        while let Some(s) = queue.pop_front() {
            if expanded == limit {
                return false;
            }
            expanded += 1;
            for c in self.successors(&s).iter() {
                if seen.insert(c.next_state.clone()) {
                    queue.push_back(c.next_state.clone());
                }
            }
        }
        true
    }

    /// Some run of the system over `trace`, found by backtracking.
    pub fn run(&mut self, trace: &Trace) -> Option<Run> {
        assert!(!trace.is_empty(), "runs need a non-empty trace");
        let mut steps = Vec::new();
        let initial = self.initial.clone();
        self.extend_run(&initial, trace.letters(), &mut steps)
            .map(|last| Run { steps, last })
    }

    fn extend_run(&mut self, s: &Formula, rest: &[Letter], steps: &mut Vec<Step>) -> Option<Formula> {
        let Some((letter, tail)) = rest.split_first() else {
            return Some(s.clone());
        };
        for c in self.successors(s).iter() {
            if !c.label.literals().iter().all(|&l| letter.holds(l)) {
                continue;
            }
            steps.push(Step {
                state: s.clone(),
                label: c.label.clone(),
            });
            if let Some(last) = self.extend_run(&c.next_state, tail, steps) {
                return Some(last);
            }
            steps.pop();
        }
        None
    }

    /// DOT rendering of the discovered part of the system.
    pub fn export_dot(&self, accepting: &dyn Fn(&Formula) -> bool) -> String {
        let index: IndexMap<&Formula, usize> =
            self.states.keys().enumerate().map(|(i, s)| (s, i)).collect();
        let mut out = String::from("digraph ts {\n  rankdir=LR;\n  init [shape=point];\n");
        for (s, &i) in &index {
            let shape = if accepting(s) { "doublecircle" } else { "circle" };
            writeln!(out, "  s{i} [shape={shape}, label=\"{}\"];", escape(&s.to_string())).unwrap();
        }
        writeln!(out, "  init -> s{};", index[&self.initial]).unwrap();
        for (s, edges) in &self.states {
            for c in edges.iter().flat_map(|e| e.iter()) {
                writeln!(
                    out,
                    "  s{} -> s{} [label=\"{}\"];",
                    index[s],
                    index[&c.next_state],
                    escape(&c.label.to_string())
                )
                .unwrap();
            }
        }
        out.push_str("}\n");
        out
    }

    /// Stable JSON dump: states in discovery order, edges in clause order.
    pub fn to_json(&self, accepting: &dyn Fn(&Formula) -> bool) -> serde_json::Value {
        let index: IndexMap<&Formula, usize> =
            self.states.keys().enumerate().map(|(i, s)| (s, i)).collect();
        let states: Vec<JsonState> = self
            .states
            .iter()
            .map(|(s, edges)| JsonState {
                id: index[s],
                formula: s.to_string(),
                expanded: edges.is_some(),
                accepting: accepting(s),
            })
            .collect();
        let edges: Vec<JsonEdge> = self
            .states
            .iter()
            .flat_map(|(s, edges)| {
                let index = &index;
                edges.iter().flat_map(|e| e.iter()).map(move |c| JsonEdge {
                    from: index[s],
                    label: c.label.literals().iter().map(|l| l.to_string()).collect(),
                    to: index[&c.next_state],
                })
            })
            .collect();
        serde_json::json!({ "initial": 0, "states": states, "edges": edges })
    }

    /// Atoms of the initial formula; every label stays within them.
    pub fn alphabet(&self) -> BTreeSet<Atom> {
        self.initial.atoms()
    }
}

#[derive(Serialize)]
struct JsonState {
    id: usize,
    formula: String,
    expanded: bool,
    accepting: bool,
}

#[derive(Serialize)]
struct JsonEdge {
    from: usize,
    label: Vec<String>,
    to: usize,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
