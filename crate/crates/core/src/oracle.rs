//! Reference semantics for finite traces.
//!
//! Nothing in here consults the normal form or the checker: [`evaluate`]
//! follows the satisfaction relation case by case, and the searches build
//! on it (or on the same case table unfolded one position at a time).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Atom, Formula, FormulaKind, Literal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("traces must contain at least one letter")]
    EmptyTrace,
    #[error("atom `{0}` is not in the trace alphabet")]
    UnknownAtom(String),
    #[error("weak next has no meaning over infinite words")]
    WeakNext,
    #[error("malformed trace text: {0}")]
    Format(String),
}

/// A total assignment over an alphabet, stored as the set of true atoms.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    true_atoms: BTreeSet<Atom>,
}

impl Letter {
    pub fn new<I: IntoIterator<Item = Atom>>(true_atoms: I) -> Letter {
        Letter {
            true_atoms: true_atoms.into_iter().collect(),
        }
    }

    pub fn holds(&self, lit: Literal) -> bool {
        self.true_atoms.contains(&lit.atom()) == lit.is_positive()
    }

    pub fn true_atoms(&self) -> &BTreeSet<Atom> {
        &self.true_atoms
    }

    /// The letter as a literal set over `alphabet`.
    pub fn literals(&self, alphabet: &BTreeSet<Atom>) -> Vec<Literal> {
        let mut lits: Vec<Literal> = alphabet
            .iter()
            .map(|&a| Literal::new(a, self.true_atoms.contains(&a)))
            .collect();
        lits.sort();
        lits
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.true_atoms.iter()).finish()
    }
}

/// A finite sequence of letters over a shared alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    alphabet: BTreeSet<Atom>,
    letters: Vec<Letter>,
}

impl Trace {
    /// Panics if a letter mentions an atom outside `alphabet`.
    pub fn new(alphabet: BTreeSet<Atom>, letters: Vec<Letter>) -> Trace {
        for l in &letters {
            assert!(
                l.true_atoms.is_subset(&alphabet),
                "letter {l:?} leaves the alphabet"
            );
        }
        Trace { alphabet, letters }
    }

    pub fn alphabet(&self) -> &BTreeSet<Atom> {
        &self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The suffix starting at position `i`.
    pub fn suffix(&self, i: usize) -> Trace {
        Trace {
            alphabet: self.alphabet.clone(),
            letters: self.letters[i..].to_vec(),
        }
    }

    /// `a=1,b=0; a=0,b=1`
    pub fn parse(text: &str) -> Result<Trace, OracleError> {
        let mut letters = Vec::new();
        let mut alphabet: Option<BTreeSet<Atom>> = None;
        for chunk in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let mut assigned = BTreeSet::new();
            let mut truths = BTreeSet::new();
            for item in chunk.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                let (name, value) = item
                    .split_once('=')
                    .ok_or_else(|| OracleError::Format(format!("expected atom=0|1, got `{item}`")))?;
                let atom = Atom::new(name.trim());
                match value.trim() {
                    "1" => {
                        truths.insert(atom);
                    }
                    "0" => {}
                    v => return Err(OracleError::Format(format!("bad value `{v}` for `{name}`"))),
                }
                if !assigned.insert(atom) {
                    return Err(OracleError::Format(format!("`{name}` assigned twice")));
                }
            }
            match &alphabet {
                None => alphabet = Some(assigned),
                Some(a) if *a == assigned => {}
                Some(_) => {
                    return Err(OracleError::Format(
                        "every letter must assign the same atoms".into(),
                    ))
                }
            }
            letters.push(Letter::new(truths));
        }
        Ok(Trace {
            alphabet: alphabet.unwrap_or_default(),
            letters,
        })
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<Atom> = self.alphabet.iter().copied().collect();
        names.sort_by_key(|a| a.name());
        for (i, letter) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            for (j, a) in names.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}={}", a, u8::from(letter.true_atoms.contains(a)))?;
            }
        }
        Ok(())
    }
}

fn check_alphabet(alphabet: &BTreeSet<Atom>, f: &Formula) -> Result<(), OracleError> {
    match f.atoms().into_iter().find(|a| !alphabet.contains(a)) {
        Some(a) => Err(OracleError::UnknownAtom(a.name().to_string())),
        None => Ok(()),
    }
}

/// Whether `trace` satisfies `f`.
pub fn evaluate(trace: &Trace, f: &Formula) -> Result<bool, OracleError> {
    if trace.is_empty() {
        return Err(OracleError::EmptyTrace);
    }
    check_alphabet(&trace.alphabet, f)?;
    let mut eval = Evaluator {
        letters: &trace.letters,
        memo: HashMap::new(),
    };
    Ok(eval.at(0, f))
}

struct Evaluator<'t> {
    letters: &'t [Letter],
    memo: HashMap<(u32, usize), bool>,
}

impl Evaluator<'_> {
    /// Truth of `f` on the suffix starting at `i`.
    fn at(&mut self, i: usize, f: &Formula) -> bool {
        if let Some(&v) = self.memo.get(&(f.id(), i)) {
            return v;
        }
        let n = self.letters.len();
        let v = match f.kind() {
            FormulaKind::True => true,
            FormulaKind::False => false,
            FormulaKind::Lit(l) => self.letters[i].holds(*l),
            FormulaKind::And(cs) => cs.iter().all(|c| self.at(i, c)),
            FormulaKind::Or(cs) => cs.iter().any(|c| self.at(i, c)),
            FormulaKind::Next(g) => i + 1 < n && self.at(i + 1, g),
            FormulaKind::WeakNext(g) => i + 1 == n || self.at(i + 1, g),
            FormulaKind::Until(l, r) => {
                (i..n).any(|k| self.at(k, r) && (i..k).all(|j| self.at(j, l)))
            }
            FormulaKind::Release(l, r) => {
                (i..n).all(|k| self.at(k, r))
                    || (i..n).any(|k| self.at(k, l) && (i..=k).all(|j| self.at(j, r)))
            }
        };
        self.memo.insert((f.id(), i), v);
        v
    }
}

fn sorted_by_name(alphabet: &BTreeSet<Atom>) -> Vec<Atom> {
    let mut v: Vec<Atom> = alphabet.iter().copied().collect();
    v.sort_by_key(|a| a.name());
    v
}

/// Letters over `alphabet` in lexicographic order: atoms sorted by name,
/// the first atom most significant, false before true.
pub fn letters_in_order(alphabet: &BTreeSet<Atom>) -> Vec<Letter> {
    let atoms = sorted_by_name(alphabet);
    assert!(atoms.len() < 24, "alphabet too large to enumerate");
    let k = atoms.len();
    (0u32..1 << k)
        .map(|bits| {
            Letter::new(
                atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> (k - 1 - i) & 1 == 1)
                    .map(|(_, &a)| a),
            )
        })
        .collect()
}

/// Exhaustively enumerates traces of length `1..=bound`, shortest first and
/// lexicographically within a length, returning the first model of `f`.
pub fn bounded_search(f: &Formula, alphabet: &BTreeSet<Atom>, bound: usize) -> Option<Trace> {
    assert!(bound >= 1, "bound must be positive");
    let letters = letters_in_order(alphabet);
    let base = letters.len();
    for len in 1..=bound {
        let total = base
            .checked_pow(len as u32)
            .expect("enumeration space overflows usize");
        for code in 0..total {
            // Most significant digit first gives lexicographic order.
            let mut rest = code;
            let mut word = vec![Letter::default(); len];
            for slot in word.iter_mut().rev() {
                *slot = letters[rest % base].clone();
                rest /= base;
            }
            let trace = Trace::new(alphabet.clone(), word);
            if evaluate(&trace, f).expect("alphabet covers formula") {
                return Some(trace);
            }
        }
    }
    None
}

/// Same answer as [`bounded_search`], computed position by position: the
/// truth of every subformula at a position depends only on the letter there
/// and the truth values one position later, so only the set of reachable
/// truth vectors per suffix length has to be kept.
pub fn bounded_search_symbolic(
    f: &Formula,
    alphabet: &BTreeSet<Atom>,
    bound: usize,
) -> Option<Trace> {
    assert!(bound >= 1, "bound must be positive");
    check_alphabet(alphabet, f).expect("alphabet covers formula");
    let table = SuffixTable::new(f);
    let letters = letters_in_order(alphabet);
    let root = table.index[&f.id()];

    // layers[k] = truth vectors realizable by suffixes of length k + 1
    let mut layers: Vec<HashSet<Vec<bool>>> = Vec::new();
    for len in 1..=bound {
        let layer: HashSet<Vec<bool>> = match layers.last() {
            None => letters.iter().map(|l| table.step(l, None)).collect(),
            Some(prev) => letters
                .iter()
                .flat_map(|l| prev.iter().map(|v| table.step(l, Some(v))))
                .collect(),
        };
        let hit = layer.iter().any(|v| v[root]);
        layers.push(layer);
        if hit {
            return Some(table.first_model(&letters, &layers, len, root, alphabet));
        }
    }
    None
}

struct SuffixTable {
    order: Vec<Formula>,
    index: HashMap<u32, usize>,
}

impl SuffixTable {
    fn new(root: &Formula) -> Self {
        // Children before parents.
        let mut order = Vec::new();
        let mut index = HashMap::new();
        fn visit(f: &Formula, order: &mut Vec<Formula>, index: &mut HashMap<u32, usize>) {
            if index.contains_key(&f.id()) {
                return;
            }
            for c in f.children() {
                visit(c, order, index);
            }
            index.insert(f.id(), order.len());
            order.push(f.clone());
        }
        visit(root, &mut order, &mut index);
        SuffixTable { order, index }
    }

    fn step(&self, letter: &Letter, next: Option<&Vec<bool>>) -> Vec<bool> {
        let mut v = vec![false; self.order.len()];
        let later = |g: &Formula| next.map(|n| n[self.index[&g.id()]]);
        for (i, f) in self.order.iter().enumerate() {
            let now = |g: &Formula, v: &Vec<bool>| v[self.index[&g.id()]];
            v[i] = match f.kind() {
                FormulaKind::True => true,
                FormulaKind::False => false,
                FormulaKind::Lit(l) => letter.holds(*l),
                FormulaKind::And(cs) => cs.iter().all(|c| now(c, &v)),
                FormulaKind::Or(cs) => cs.iter().any(|c| now(c, &v)),
                FormulaKind::Next(g) => later(g) == Some(true),
                FormulaKind::WeakNext(g) => later(g) != Some(false),
                FormulaKind::Until(l, r) => {
                    now(r, &v) || (now(l, &v) && later(f) == Some(true))
                }
                FormulaKind::Release(l, r) => {
                    now(r, &v) && (now(l, &v) || later(f) != Some(false))
                }
            };
        }
        v
    }

    fn first_model(
        &self,
        letters: &[Letter],
        layers: &[HashSet<Vec<bool>>],
        len: usize,
        root: usize,
        alphabet: &BTreeSet<Atom>,
    ) -> Trace {
        let mut targets: HashSet<Vec<bool>> =
            layers[len - 1].iter().filter(|v| v[root]).cloned().collect();
        let mut out = Vec::with_capacity(len);
        for pos in 0..len {
            let remaining = len - pos - 1;
            let chosen = letters.iter().find_map(|l| {
                if remaining == 0 {
                    targets.contains(&self.step(l, None)).then(|| (l, HashSet::new()))
                } else {
                    let next: HashSet<Vec<bool>> = layers[remaining - 1]
                        .iter()
                        .filter(|v| targets.contains(&self.step(l, Some(v))))
                        .cloned()
                        .collect();
                    (!next.is_empty()).then_some((l, next))
                }
            });
            let (letter, next) = chosen.expect("target set is realizable");
            out.push(letter.clone());
            targets = next;
        }
        Trace::new(alphabet.clone(), out)
    }
}

/// Evaluates `f` on the infinite word `A A A ...` under infinite-trace
/// semantics. Every suffix of a constant word is the word itself, so `X g`,
/// `l U r` and `l R r` collapse to `g`, `r` and `r` respectively.
pub fn lasso_evaluate_single(letter: &Letter, f: &Formula) -> Result<bool, OracleError> {
    if f.any_node(&mut |g| matches!(g.kind(), FormulaKind::WeakNext(_))) {
        return Err(OracleError::WeakNext);
    }
    fn go(letter: &Letter, f: &Formula) -> bool {
        match f.kind() {
            FormulaKind::True => true,
            FormulaKind::False => false,
            FormulaKind::Lit(l) => letter.holds(*l),
            FormulaKind::And(cs) => cs.iter().all(|c| go(letter, c)),
            FormulaKind::Or(cs) => cs.iter().any(|c| go(letter, c)),
            FormulaKind::Next(g) => go(letter, g),
            FormulaKind::Until(_, r) | FormulaKind::Release(_, r) => go(letter, r),
            FormulaKind::WeakNext(_) => unreachable!(),
        }
    }
    Ok(go(letter, f))
}
