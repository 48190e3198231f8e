//! One-step expansion of a formula into clauses `label ∧ X(next)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::formula::{Atom, Formula, FormulaKind, Literal};

/// A consistent conjunction of literals, kept sorted. Empty means `tt`.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Vec<Literal>);

impl Label {
    pub fn empty() -> Label {
        Label(Vec::new())
    }

    /// Builds a label, or `None` if the literals clash.
    pub fn new<I: IntoIterator<Item = Literal>>(lits: I) -> Option<Label> {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort();
        v.dedup();
        label_consistent(&v).then_some(Label(v))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    /// Conjunction of two labels; `None` when inconsistent.
    pub fn conjoin(&self, other: &Label) -> Option<Label> {
        Label::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Completes the label to a total assignment over `alphabet`; atoms the
    /// label leaves open are set false.
    pub fn complete(&self, alphabet: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        alphabet
            .iter()
            .copied()
            .filter(|a| self.contains(a.positive()))
            .collect()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("true");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// True iff no atom occurs with both polarities. Expects sorted input.
pub fn label_consistent(lits: &[Literal]) -> bool {
    lits.windows(2).all(|w| w[0].atom() != w[1].atom() || w[0] == w[1])
}

/// One clause of the normal form: `label` now, `next_state` from the next
/// position on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalFormClause {
    pub label: Label,
    pub next_state: Formula,
}

impl NormalFormClause {
    pub fn new(label: Label, next_state: Formula) -> Self {
        NormalFormClause { label, next_state }
    }
}

pub type Clauses = Arc<[NormalFormClause]>;

/// Memo table for [`nf`], shared across threads: readers proceed
/// concurrently, insertion takes the write lock.
#[derive(Default)]
pub struct NormalFormCache {
    memo: RwLock<HashMap<u32, Clauses>>,
}

impl NormalFormCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Clauses of `f`, sorted by (label, next state id) and duplicate free.
    pub fn clauses(&self, f: &Formula) -> Clauses {
        if let Some(c) = self.memo.read().unwrap().get(&f.id()) {
            return c.clone();
        }
        let mut out = self.compute(f);
        out.sort();
        out.dedup();
        let out: Clauses = out.into();
        self.memo.write().unwrap().insert(f.id(), out.clone());
        out
    }

    fn compute(&self, f: &Formula) -> Vec<NormalFormClause> {
        match f.kind() {
            FormulaKind::False => Vec::new(),
            FormulaKind::True => vec![NormalFormClause::new(Label::empty(), Formula::tt())],
            FormulaKind::Lit(l) => vec![NormalFormClause::new(
                Label::new([*l]).expect("single literal"),
                Formula::tt(),
            )],
            FormulaKind::Next(g) | FormulaKind::WeakNext(g) => g
                .disjuncts()
                .into_iter()
                .map(|d| NormalFormClause::new(Label::empty(), d))
                .collect(),
            FormulaKind::Until(lhs, rhs) => {
                let mut out = self.clauses(rhs).to_vec();
                out.extend(self.delay(lhs, f));
                out
            }
            FormulaKind::Release(lhs, rhs) => {
                let mut out = product(&self.clauses(lhs), &self.clauses(rhs));
                out.extend(self.delay(rhs, f));
                out
            }
            FormulaKind::Or(cs) => cs.iter().flat_map(|c| self.clauses(c).to_vec()).collect(),
            FormulaKind::And(cs) => {
                let mut acc = vec![NormalFormClause::new(Label::empty(), Formula::tt())];
                for c in cs.iter() {
                    acc = product(&acc, &self.clauses(c));
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }

    /// Clauses of `now ∧ X(later)`.
    fn delay(&self, now: &Formula, later: &Formula) -> Vec<NormalFormClause> {
        self.clauses(now)
            .iter()
            .map(|c| {
                NormalFormClause::new(
                    c.label.clone(),
                    Formula::and([c.next_state.clone(), later.clone()]),
                )
            })
            .collect()
    }
}

fn product(lhs: &[NormalFormClause], rhs: &[NormalFormClause]) -> Vec<NormalFormClause> {
    let mut out = Vec::with_capacity(lhs.len() * rhs.len());
    for a in lhs {
        for b in rhs {
            if let Some(label) = a.label.conjoin(&b.label) {
                out.push(NormalFormClause::new(
                    label,
                    Formula::and([a.next_state.clone(), b.next_state.clone()]),
                ));
            }
        }
    }
    out
}

/// Normal form of `f` with a throwaway memo table.
pub fn nf(f: &Formula) -> Vec<NormalFormClause> {
    NormalFormCache::new().clauses(f).to_vec()
}
