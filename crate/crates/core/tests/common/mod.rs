//! Shared helpers for the integration tests: the seeded corpus, trace
//! enumeration, and an exact infinite-trace LTL satisfiability checker used
//! to stand in for an external LTL solver.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use ltlf_check::bench_gen::corpus;
use ltlf_check::ltl_bridge::{ExternalLtlSolver, LtlAnswer, LtlSolverError};
use ltlf_check::oracle::{letters_in_order, Letter, Trace};
use ltlf_check::{to_nnf, Atom, Formula, FormulaKind};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

pub const CORPUS_SEED: u64 = 0x5eed_2014;
pub const CORPUS_SIZE: usize = 2000;

/// The seeded corpus: at most three atoms and seven surface nodes each.
pub fn corpus_formulas() -> Vec<Formula> {
    corpus(CORPUS_SEED, CORPUS_SIZE).iter().map(to_nnf).collect()
}

pub fn abc() -> BTreeSet<Atom> {
    ["a", "b", "c"].iter().map(|n| Atom::new(n)).collect()
}

/// Every trace of length `1..=max_len` over complete letters of `alphabet`.
pub fn all_traces(alphabet: &BTreeSet<Atom>, max_len: usize) -> Vec<Trace> {
    let letters = letters_in_order(alphabet);
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                letters.iter().map(move |l| {
                    let mut v = prefix.clone();
                    v.push(l.clone());
                    v
                })
            })
            .collect();
        out.extend(layer.iter().map(|ls| Trace::new(alphabet.clone(), ls.clone())));
    }
    out
}

/// Exact satisfiability of `f` read as an LTL formula over infinite words;
/// weak next is read as next.
///
/// States are truth assignments to the closure that respect the one-step
/// unfoldings; a model is a reachable non-trivial strongly connected
/// component that fulfils every until.
pub fn ltl_satisfiable(f: &Formula) -> bool {
    let closure: Vec<Formula> = f.closure().iter().cloned().collect();
    let index: HashMap<u32, usize> = closure.iter().enumerate().map(|(i, g)| (g.id(), i)).collect();
    let atoms: Vec<Atom> = f.atoms().into_iter().collect();
    let temporal: Vec<usize> = (0..closure.len())
        .filter(|&i| {
            matches!(
                closure[i].kind(),
                FormulaKind::Next(_)
                    | FormulaKind::WeakNext(_)
                    | FormulaKind::Until(..)
                    | FormulaKind::Release(..)
            )
        })
        .collect();
    let free = atoms.len() + temporal.len();
    assert!(free <= 20, "formula too large for the exact LTL checker");

    // Closure members are ordered by id, so children precede parents.
    let at = |g: &Formula| index[&g.id()];
    let mut states: Vec<Vec<bool>> = Vec::new();
    for bits in 0u32..(1 << free) {
        let truth_atoms: HashSet<Atom> =
            atoms.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &a)| a).collect();
        let mut v = vec![false; closure.len()];
        for (j, &i) in temporal.iter().enumerate() {
            v[i] = bits >> (atoms.len() + j) & 1 == 1;
        }
        let mut ok = true;
        for (i, g) in closure.iter().enumerate() {
            match g.kind() {
                FormulaKind::True => v[i] = true,
                FormulaKind::False => v[i] = false,
                FormulaKind::Lit(l) => v[i] = truth_atoms.contains(&l.atom()) == l.is_positive(),
                FormulaKind::And(cs) => v[i] = cs.iter().all(|c| v[at(c)]),
                FormulaKind::Or(cs) => v[i] = cs.iter().any(|c| v[at(c)]),
                FormulaKind::Until(l, r) => {
                    let (l, r) = (v[at(l)], v[at(r)]);
                    ok &= (!v[i] || l || r) && (!r || v[i]);
                }
                FormulaKind::Release(l, r) => {
                    let (l, r) = (v[at(l)], v[at(r)]);
                    ok &= (!v[i] || r) && (!(l && r) || v[i]);
                }
                FormulaKind::Next(_) | FormulaKind::WeakNext(_) => {}
            }
        }
        if ok {
            states.push(v);
        }
    }

    let step_ok = |s: &[bool], t: &[bool]| {
        closure.iter().enumerate().all(|(i, g)| match g.kind() {
            FormulaKind::Next(c) | FormulaKind::WeakNext(c) => s[i] == t[at(c)],
            FormulaKind::Until(l, r) => s[i] == (s[at(r)] || (s[at(l)] && t[i])),
            FormulaKind::Release(l, r) => s[i] == (s[at(r)] && (s[at(l)] || t[i])),
            _ => true,
        })
    };
    let mut graph: DiGraph<usize, ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..states.len()).map(|i| graph.add_node(i)).collect();
    for (i, s) in states.iter().enumerate() {
        for (j, t) in states.iter().enumerate() {
            if step_ok(s, t) {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }

    let root = at(f);
    let mut reachable = vec![false; states.len()];
    let mut queue: VecDeque<NodeIndex> = VecDeque::new();
    for (i, s) in states.iter().enumerate() {
        if s[root] {
            reachable[i] = true;
            queue.push_back(nodes[i]);
        }
    }
    while let Some(n) = queue.pop_front() {
        for m in graph.neighbors(n) {
            if !reachable[graph[m]] {
                reachable[graph[m]] = true;
                queue.push_back(m);
            }
        }
    }

    let untils: Vec<(usize, usize)> = closure
        .iter()
        .enumerate()
        .filter_map(|(i, g)| match g.kind() {
            FormulaKind::Until(_, r) => Some((i, at(r))),
            _ => None,
        })
        .collect();
    tarjan_scc(&graph).into_iter().any(|scc| {
        let nontrivial = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        nontrivial
            && reachable[graph[scc[0]]]
            && untils.iter().all(|&(u, r)| {
                scc.iter().any(|&n| {
                    let s = &states[graph[n]];
                    !s[u] || s[r]
                })
            })
    })
}

/// An in-process stand-in for an external LTL solver.
pub struct MockLtlSolver;

impl ExternalLtlSolver for MockLtlSolver {
    fn solve_ltl(&self, f: &Formula) -> Result<LtlAnswer, LtlSolverError> {
        Ok(if ltl_satisfiable(f) {
            LtlAnswer::Sat
        } else {
            LtlAnswer::Unsat
        })
    }
}
