//! Hash-consed LTLf formulas in negation normal form.
//!
//! Every [`Formula`] is interned in a process-wide table, so structural
//! equality is pointer/id equality. Conjunctions and disjunctions are kept
//! flat, sorted by id and duplicate free, with `tt`/`ff` absorbed at
//! construction time.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

/// An atomic proposition, identified by a dense id handed out by the atom
/// interner. Two atoms are equal iff their names are equal.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(u32);

#[derive(Default)]
struct AtomTable {
    by_name: HashMap<Arc<str>, u32>,
    names: Vec<Arc<str>>,
}

fn atom_table() -> &'static RwLock<AtomTable> {
    static TABLE: OnceLock<RwLock<AtomTable>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

impl Atom {
    /// Interns `name`. Panics on an empty name; the parser never produces one.
    pub fn new(name: &str) -> Atom {
        assert!(!name.is_empty(), "atom names must be non-empty");
        if let Some(&id) = atom_table().read().unwrap().by_name.get(name) {
            return Atom(id);
        }
        let mut table = atom_table().write().unwrap();
        if let Some(&id) = table.by_name.get(name) {
            return Atom(id);
        }
        let id = table.names.len() as u32;
        let name: Arc<str> = Arc::from(name);
        table.names.push(name.clone());
        table.by_name.insert(name, id);
        Atom(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn name(self) -> Arc<str> {
        atom_table().read().unwrap().names[self.0 as usize].clone()
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// An atom or its negation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    atom: Atom,
    positive: bool,
}

impl Literal {
    pub fn new(atom: Atom, positive: bool) -> Literal {
        Literal { atom, positive }
    }

    pub fn atom(self) -> Atom {
        self.atom
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Literal {
        Literal {
            atom: self.atom,
            positive: !self.positive,
        }
    }
}

impl fmt::Debug for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum FormulaKind {
    True,
    False,
    Lit(Literal),
    And(Box<[Formula]>),
    Or(Box<[Formula]>),
    Next(Formula),
    WeakNext(Formula),
    Until(Formula, Formula),
    Release(Formula, Formula),
}

struct Node {
    id: u32,
    kind: FormulaKind,
    children: Box<[Formula]>,
    size: usize,
}

/// A canonical NNF formula. Cloning is cheap; equality, hashing and
/// ordering go through the unique id.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

#[derive(PartialEq, Eq, Hash)]
enum Key {
    True,
    False,
    Lit(Literal),
    And(Box<[u32]>),
    Or(Box<[u32]>),
    Next(u32),
    WeakNext(u32),
    Until(u32, u32),
    Release(u32, u32),
}

#[derive(Default)]
struct Interner {
    nodes: HashMap<Key, Formula>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(Default::default)
}

fn ids(children: &[Formula]) -> Box<[u32]> {
    children.iter().map(Formula::id).collect()
}

fn intern(kind: FormulaKind) -> Formula {
    let key = match &kind {
        FormulaKind::True => Key::True,
        FormulaKind::False => Key::False,
        FormulaKind::Lit(l) => Key::Lit(*l),
        FormulaKind::And(cs) => Key::And(ids(cs)),
        FormulaKind::Or(cs) => Key::Or(ids(cs)),
        FormulaKind::Next(c) => Key::Next(c.id()),
        FormulaKind::WeakNext(c) => Key::WeakNext(c.id()),
        FormulaKind::Until(l, r) => Key::Until(l.id(), r.id()),
        FormulaKind::Release(l, r) => Key::Release(l.id(), r.id()),
    };
    if let Some(f) = interner().read().unwrap().nodes.get(&key) {
        return f.clone();
    }
    let mut table = interner().write().unwrap();
    if let Some(f) = table.nodes.get(&key) {
        return f.clone();
    }
    let children: Box<[Formula]> = match &kind {
        FormulaKind::True | FormulaKind::False | FormulaKind::Lit(_) => Box::new([]),
        FormulaKind::And(cs) | FormulaKind::Or(cs) => cs.clone(),
        FormulaKind::Next(c) | FormulaKind::WeakNext(c) => Box::new([c.clone()]),
        FormulaKind::Until(l, r) | FormulaKind::Release(l, r) => Box::new([l.clone(), r.clone()]),
    };
    let size = 1 + children.iter().map(Formula::size).sum::<usize>();
    let id = table.nodes.len() as u32;
    let f = Formula(Arc::new(Node {
        id,
        kind,
        children,
        size,
    }));
    table.nodes.insert(key, f.clone());
    f
}

impl Formula {
    pub fn tt() -> Formula {
        intern(FormulaKind::True)
    }

    pub fn ff() -> Formula {
        intern(FormulaKind::False)
    }

    pub fn literal(lit: Literal) -> Formula {
        intern(FormulaKind::Lit(lit))
    }

    /// Positive literal for the atom called `name`.
    pub fn atom(name: &str) -> Formula {
        Formula::literal(Atom::new(name).positive())
    }

    /// Canonical conjunction: flattened, `tt` dropped, `ff` absorbing,
    /// deduplicated and sorted by id. The empty conjunction is `tt`.
    pub fn and<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut children = Vec::new();
        for f in items {
            match f.kind() {
                FormulaKind::True => {}
                FormulaKind::False => return Formula::ff(),
                FormulaKind::And(cs) => children.extend(cs.iter().cloned()),
                _ => children.push(f),
            }
        }
        children.sort();
        children.dedup();
        match children.len() {
            0 => Formula::tt(),
            1 => children.pop().unwrap(),
            _ => intern(FormulaKind::And(children.into_boxed_slice())),
        }
    }

    /// Dual of [`Formula::and`].
    pub fn or<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut children = Vec::new();
        for f in items {
            match f.kind() {
                FormulaKind::False => {}
                FormulaKind::True => return Formula::tt(),
                FormulaKind::Or(cs) => children.extend(cs.iter().cloned()),
                _ => children.push(f),
            }
        }
        children.sort();
        children.dedup();
        match children.len() {
            0 => Formula::ff(),
            1 => children.pop().unwrap(),
            _ => intern(FormulaKind::Or(children.into_boxed_slice())),
        }
    }

    pub fn next(f: Formula) -> Formula {
        intern(FormulaKind::Next(f))
    }

    pub fn weak_next(f: Formula) -> Formula {
        intern(FormulaKind::WeakNext(f))
    }

    pub fn until(lhs: Formula, rhs: Formula) -> Formula {
        intern(FormulaKind::Until(lhs, rhs))
    }

    pub fn release(lhs: Formula, rhs: Formula) -> Formula {
        intern(FormulaKind::Release(lhs, rhs))
    }

    /// `G f`, i.e. `false R f`.
    pub fn globally(f: Formula) -> Formula {
        Formula::release(Formula::ff(), f)
    }

    /// `F f`, i.e. `true U f`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::tt(), f)
    }

    pub fn id(&self) -> u32 {
        self.0.id
    }

    pub fn kind(&self) -> &FormulaKind {
        &self.0.kind
    }

    /// Number of nodes of the formula read as a tree.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_tt(&self) -> bool {
        matches!(self.kind(), FormulaKind::True)
    }

    pub fn is_ff(&self) -> bool {
        matches!(self.kind(), FormulaKind::False)
    }

    /// True iff no temporal operator occurs.
    pub fn is_propositional(&self) -> bool {
        match self.kind() {
            FormulaKind::True | FormulaKind::False | FormulaKind::Lit(_) => true,
            FormulaKind::And(cs) | FormulaKind::Or(cs) => cs.iter().all(Formula::is_propositional),
            _ => false,
        }
    }

    /// `ff R psi` pattern: returns `psi`.
    pub fn as_globally(&self) -> Option<&Formula> {
        match self.kind() {
            FormulaKind::Release(l, r) if l.is_ff() => Some(r),
            _ => None,
        }
    }

    /// The NNF of the negation, using the X/N, U/R and And/Or dualities.
    pub fn negate(&self) -> Formula {
        match self.kind() {
            FormulaKind::True => Formula::ff(),
            FormulaKind::False => Formula::tt(),
            FormulaKind::Lit(l) => Formula::literal(l.negate()),
            FormulaKind::And(cs) => Formula::or(cs.iter().map(Formula::negate)),
            FormulaKind::Or(cs) => Formula::and(cs.iter().map(Formula::negate)),
            FormulaKind::Next(c) => Formula::weak_next(c.negate()),
            FormulaKind::WeakNext(c) => Formula::next(c.negate()),
            FormulaKind::Until(l, r) => Formula::release(l.negate(), r.negate()),
            FormulaKind::Release(l, r) => Formula::until(l.negate(), r.negate()),
        }
    }

    /// Direct children, left to right.
    pub fn children(&self) -> &[Formula] {
        &self.0.children
    }

    /// The set of conjuncts: the children of an `And`, otherwise `{self}`.
    pub fn conjuncts(&self) -> Vec<Formula> {
        match self.kind() {
            FormulaKind::And(cs) => cs.to_vec(),
            _ => vec![self.clone()],
        }
    }

    /// The set of disjuncts: the children of an `Or`, otherwise `{self}`.
    pub fn disjuncts(&self) -> Vec<Formula> {
        match self.kind() {
            FormulaKind::Or(cs) => cs.to_vec(),
            _ => vec![self.clone()],
        }
    }

    /// All atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.id()) {
                continue;
            }
            if let FormulaKind::Lit(l) = f.kind() {
                out.insert(l.atom());
            }
            stack.extend(f.children().iter().cloned());
        }
        out
    }

    /// True iff some node satisfies `pred`.
    pub fn any_node(&self, pred: &mut dyn FnMut(&Formula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        self.children().iter().any(|c| c.any_node(pred))
    }

    pub fn closure(&self) -> Closure {
        Closure::of(self)
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.id() == other.id()
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id().hash(state)
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id().cmp(&other.id())
    }
}

fn is_binary(f: &Formula) -> bool {
    matches!(
        f.kind(),
        FormulaKind::And(_) | FormulaKind::Or(_) | FormulaKind::Until(..) | FormulaKind::Release(..)
    )
}

struct Operand<'a>(&'a Formula);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_binary(self.0) {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            FormulaKind::True => f.write_str("true"),
            FormulaKind::False => f.write_str("false"),
            FormulaKind::Lit(l) => write!(f, "{l}"),
            FormulaKind::And(cs) | FormulaKind::Or(cs) => {
                let sep = if matches!(self.kind(), FormulaKind::And(_)) { " & " } else { " | " };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    write!(f, "{}", Operand(c))?;
                }
                Ok(())
            }
            FormulaKind::Next(c) => write!(f, "X {}", Operand(c)),
            FormulaKind::WeakNext(c) => write!(f, "N {}", Operand(c)),
            FormulaKind::Until(l, r) => write!(f, "{} U {}", Operand(l), Operand(r)),
            FormulaKind::Release(l, r) => write!(f, "{} R {}", Operand(l), Operand(r)),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The set of subformulas of a formula, the formula itself included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    members: BTreeSet<Formula>,
}

impl Closure {
    pub fn of(root: &Formula) -> Closure {
        let mut members = BTreeSet::new();
        let mut stack = vec![root.clone()];
        while let Some(f) = stack.pop() {
            if members.insert(f.clone()) {
                stack.extend(f.children().iter().cloned());
            }
        }
        Closure { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.members.contains(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.members.iter()
    }
}

/// A formula with no temporal operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PropositionalFormula(Formula);

impl PropositionalFormula {
    pub fn new(f: Formula) -> Option<Self> {
        f.is_propositional().then_some(PropositionalFormula(f))
    }

    pub fn tt() -> Self {
        PropositionalFormula(Formula::tt())
    }

    pub fn ff() -> Self {
        PropositionalFormula(Formula::ff())
    }

    pub fn and(lhs: &Self, rhs: &Self) -> Self {
        PropositionalFormula(Formula::and([lhs.0.clone(), rhs.0.clone()]))
    }

    pub fn or(lhs: &Self, rhs: &Self) -> Self {
        PropositionalFormula(Formula::or([lhs.0.clone(), rhs.0.clone()]))
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    /// Truth value under an assignment; atoms missing from it count as false.
    pub fn eval(&self, truth: &dyn Fn(Atom) -> bool) -> bool {
        fn go(f: &Formula, truth: &dyn Fn(Atom) -> bool) -> bool {
            match f.kind() {
                FormulaKind::True => true,
                FormulaKind::False => false,
                FormulaKind::Lit(l) => truth(l.atom()) == l.is_positive(),
                FormulaKind::And(cs) => cs.iter().all(|c| go(c, truth)),
                FormulaKind::Or(cs) => cs.iter().any(|c| go(c, truth)),
                _ => unreachable!("temporal operator in propositional formula"),
            }
        }
        go(&self.0, truth)
    }
}

impl fmt::Display for PropositionalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
