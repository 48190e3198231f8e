//! Propositional satisfiability for obligation formulas.
//!
//! Formulas are encoded into CNF with one auxiliary variable per `And`/`Or`
//! node. Since inputs are in NNF every node occurs positively, so only the
//! implication from the auxiliary variable to its definition is emitted.
//! The embedded solver is a small CDCL loop (two watched literals, first-UIP
//! learning, activity-based branching); an external DIMACS solver can be
//! plugged in instead.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::formula::{Atom, Formula, FormulaKind, PropositionalFormula};
use crate::process::{fill_template, run_shell, ProcessError};

/// A clause set in DIMACS numbering: variables are `1..=num_vars`, a
/// negative integer is a negated variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                write!(out, "{l} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }
}

/// CNF encoding of a propositional formula together with the variable of
/// each original atom.
#[derive(Clone, Debug)]
pub struct Encoding {
    pub cnf: Cnf,
    pub atoms: BTreeMap<Atom, i32>,
}

pub fn encode(f: &PropositionalFormula) -> Encoding {
    let atoms: BTreeMap<Atom, i32> = f
        .formula()
        .atoms()
        .into_iter()
        .enumerate()
        .map(|(i, a)| (a, i as i32 + 1))
        .collect();
    let mut enc = Encoder {
        next_var: atoms.len() as i32,
        atoms: &atoms,
        memo: HashMap::new(),
        clauses: Vec::new(),
    };
    match f.formula().kind() {
        FormulaKind::True => {}
        FormulaKind::False => enc.clauses.push(Vec::new()),
        _ => {
            let root = enc.literal(f.formula());
            enc.clauses.push(vec![root]);
        }
    }
    Encoding {
        cnf: Cnf {
            num_vars: enc.next_var as usize,
            clauses: enc.clauses,
        },
        atoms,
    }
}

struct Encoder<'a> {
    next_var: i32,
    atoms: &'a BTreeMap<Atom, i32>,
    memo: HashMap<u32, i32>,
    clauses: Vec<Vec<i32>>,
}

impl Encoder<'_> {
    fn literal(&mut self, f: &Formula) -> i32 {
        if let FormulaKind::Lit(l) = f.kind() {
            let v = self.atoms[&l.atom()];
            return if l.is_positive() { v } else { -v };
        }
        if let Some(&v) = self.memo.get(&f.id()) {
            return v;
        }
        let children: Vec<i32> = f.children().iter().map(|c| self.literal(c)).collect();
        self.next_var += 1;
        let x = self.next_var;
        match f.kind() {
            FormulaKind::And(_) => {
                for c in children {
                    self.clauses.push(vec![-x, c]);
                }
            }
            FormulaKind::Or(_) => {
                let mut clause = vec![-x];
                clause.extend(children);
                self.clauses.push(clause);
            }
            // Canonical And/Or never hold constants.
            _ => unreachable!("unexpected node {f} inside propositional formula"),
        }
        self.memo.insert(f.id(), x);
        x
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatOutcome {
    /// Values of variables `1..=num_vars`, index 0 unused.
    Sat(Vec<bool>),
    Unsat,
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("could not write the CNF file: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver answer not understood: {0}")]
    Answer(String),
}

pub trait CnfSolver: Send + Sync {
    fn solve_cnf(&self, cnf: &Cnf) -> Result<SatOutcome, SatError>;
}

/// A total assignment over the queried formula's atoms.
pub type Assignment = BTreeMap<Atom, bool>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

/// Decides `f` with the embedded solver.
pub fn solve(f: &PropositionalFormula) -> SolveResult {
    solve_with(f, &Cdcl).expect("embedded solver is total")
}

pub fn solve_with(f: &PropositionalFormula, solver: &dyn CnfSolver) -> Result<SolveResult, SatError> {
    if f.formula().is_tt() {
        return Ok(SolveResult::Sat(Assignment::new()));
    }
    if f.formula().is_ff() {
        return Ok(SolveResult::Unsat);
    }
    let enc = encode(f);
    Ok(match solver.solve_cnf(&enc.cnf)? {
        SatOutcome::Unsat => SolveResult::Unsat,
        SatOutcome::Sat(values) => {
            let assignment: Assignment = enc
                .atoms
                .iter()
                .map(|(&a, &v)| (a, values.get(v as usize).copied().unwrap_or(false)))
                .collect();
            if !f.eval(&|a| assignment.get(&a).copied().unwrap_or(false)) {
                return Err(SatError::Answer("model does not satisfy the formula".into()));
            }
            SolveResult::Sat(assignment)
        }
    })
}

/// Which solver answers obligation queries.
#[derive(Clone, Debug, Default)]
pub enum SatBackend {
    #[default]
    Embedded,
    External(ExternalSolver),
}

impl SatBackend {
    /// External failures fall back to the embedded solver.
    pub fn solve(&self, f: &PropositionalFormula) -> SolveResult {
        match self {
            SatBackend::Embedded => solve(f),
            SatBackend::External(ext) => solve_with(f, ext).unwrap_or_else(|_| solve(f)),
        }
    }
}

const UNASSIGNED: u8 = 2;

/// Embedded CDCL solver.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cdcl;

impl CnfSolver for Cdcl {
    fn solve_cnf(&self, cnf: &Cnf) -> Result<SatOutcome, SatError> {
        Ok(CdclState::new(cnf).map_or(SatOutcome::Unsat, |mut s| s.run()))
    }
}

// Internal literal code: 2 * var + (1 if negated), vars from 0.
fn code(dimacs: i32) -> usize {
    let v = dimacs.unsigned_abs() as usize - 1;
    2 * v + usize::from(dimacs < 0)
}

struct CdclState {
    clauses: Vec<Vec<usize>>,
    watches: Vec<Vec<usize>>,
    values: Vec<u8>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    activity: Vec<f64>,
    bump: f64,
    trail: Vec<usize>,
    trail_lim: Vec<usize>,
    head: usize,
}

impl CdclState {
    /// `None` if the clause set is trivially unsatisfiable.
    fn new(cnf: &Cnf) -> Option<Self> {
        let n = cnf.num_vars;
        let mut s = CdclState {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            values: vec![UNASSIGNED; n],
            level: vec![0; n],
            reason: vec![None; n],
            activity: vec![0.0; n],
            bump: 1.0,
            trail: Vec::new(),
            trail_lim: Vec::new(),
            head: 0,
        };
        for c in &cnf.clauses {
            let mut lits: Vec<usize> = c.iter().map(|&l| code(l)).collect();
            lits.sort_unstable();
            lits.dedup();
            if lits.windows(2).any(|w| w[0] ^ 1 == w[1]) {
                continue;
            }
            match lits.len() {
                0 => return None,
                1 => match s.value(lits[0]) {
                    Some(false) => return None,
                    Some(true) => {}
                    None => s.assign(lits[0], None),
                },
                _ => {
                    s.add_clause(lits);
                }
            }
        }
        Some(s)
    }

    fn value(&self, lit: usize) -> Option<bool> {
        match self.values[lit / 2] {
            UNASSIGNED => None,
            v => Some((v == 1) != (lit & 1 == 1)),
        }
    }

    fn assign(&mut self, lit: usize, reason: Option<usize>) {
        let var = lit / 2;
        self.values[var] = u8::from(lit & 1 == 0);
        self.level[var] = self.trail_lim.len();
        self.reason[var] = reason;
        self.trail.push(lit);
    }

    fn add_clause(&mut self, lits: Vec<usize>) -> usize {
        let idx = self.clauses.len();
        self.watches[lits[0] ^ 1].push(idx);
        self.watches[lits[1] ^ 1].push(idx);
        self.clauses.push(lits);
        idx
    }

    /// Returns a conflicting clause, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.head < self.trail.len() {
            let lit = self.trail[self.head];
            self.head += 1;
            // Clauses watching ¬lit, which just became false.
            let false_lit = lit ^ 1;
            let mut watching = std::mem::take(&mut self.watches[lit]);
            let mut i = 0;
            let mut conflict = None;
            while i < watching.len() {
                let ci = watching[i];
                if self.clauses[ci][0] == false_lit {
                    self.clauses[ci].swap(0, 1);
                }
                let first = self.clauses[ci][0];
                if self.value(first) == Some(true) {
                    i += 1;
                    continue;
                }
                let replacement = (2..self.clauses[ci].len())
                    .find(|&k| self.value(self.clauses[ci][k]) != Some(false));
                if let Some(k) = replacement {
                    let clause = &mut self.clauses[ci];
                    clause.swap(1, k);
                    let new_watch = clause[1] ^ 1;
                    self.watches[new_watch].push(ci);
                    watching.swap_remove(i);
                    continue;
                }
                match self.value(first) {
                    Some(false) => {
                        conflict = Some(ci);
                        break;
                    }
                    _ => {
                        self.assign(first, Some(ci));
                        i += 1;
                    }
                }
            }
            let rest = std::mem::take(&mut self.watches[lit]);
            watching.extend(rest);
            self.watches[lit] = watching;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP conflict analysis: the learnt clause (asserting literal
    /// first) and the level to jump back to.
    fn analyze(&mut self, mut conflict: usize) -> (Vec<usize>, usize) {
        let current = self.trail_lim.len();
        let mut seen = vec![false; self.values.len()];
        let mut learnt = vec![usize::MAX];
        let mut pending = 0;
        let mut index = self.trail.len();
        let mut resolved: Option<usize> = None;
        loop {
            let lits: Vec<usize> = self.clauses[conflict].clone();
            for &l in &lits {
                if Some(l) == resolved {
                    continue;
                }
                let var = l / 2;
                if seen[var] || self.level[var] == 0 {
                    continue;
                }
                seen[var] = true;
                self.activity[var] += self.bump;
                if self.level[var] == current {
                    pending += 1;
                } else {
                    learnt.push(l);
                }
            }
            // Next literal on the trail that took part in the conflict.
            loop {
                index -= 1;
                if seen[self.trail[index] / 2] {
                    break;
                }
            }
            let lit = self.trail[index];
            pending -= 1;
            if pending == 0 {
                learnt[0] = lit ^ 1;
                break;
            }
            resolved = Some(lit);
            conflict = self.reason[lit / 2].expect("implied literal has a reason");
        }
        self.bump *= 1.05;
        let back = learnt[1..].iter().map(|&l| self.level[l / 2]).max().unwrap_or(0);
        // Keep a literal of the backjump level in the second watch slot.
        if learnt.len() > 1 {
            let k = (1..learnt.len()).max_by_key(|&k| self.level[learnt[k] / 2]).unwrap();
            learnt.swap(1, k);
        }
        (learnt, back)
    }

    fn backjump(&mut self, level: usize) {
        if self.trail_lim.len() <= level {
            return;
        }
        let keep = self.trail_lim[level];
        for &lit in &self.trail[keep..] {
            self.values[lit / 2] = UNASSIGNED;
            self.reason[lit / 2] = None;
        }
        self.trail.truncate(keep);
        self.trail_lim.truncate(level);
        self.head = keep;
    }

    fn pick(&self) -> Option<usize> {
        (0..self.values.len())
            .filter(|&v| self.values[v] == UNASSIGNED)
            .max_by(|&a, &b| {
                self.activity[a]
                    .partial_cmp(&self.activity[b])
                    .unwrap()
                    .then(b.cmp(&a))
            })
    }

    fn run(&mut self) -> SatOutcome {
        loop {
            if let Some(conflict) = self.propagate() {
                if self.trail_lim.is_empty() {
                    return SatOutcome::Unsat;
                }
                let (learnt, back) = self.analyze(conflict);
                self.backjump(back);
                let asserting = learnt[0];
                if learnt.len() == 1 {
                    self.assign(asserting, None);
                } else {
                    let ci = self.add_clause(learnt);
                    self.assign(asserting, Some(ci));
                }
                continue;
            }
            match self.pick() {
                None => {
                    let mut model = vec![false];
                    model.extend(self.values.iter().map(|&v| v == 1));
                    return SatOutcome::Sat(model);
                }
                Some(var) => {
                    self.trail_lim.push(self.trail.len());
                    // Branch false first: unconstrained atoms default false.
                    self.assign(2 * var + 1, None);
                }
            }
        }
    }
}

/// An external solver speaking DIMACS: the command template's `{file}` is
/// replaced by a CNF file path; the answer is read from `s` and `v` lines.
#[derive(Clone, Debug)]
pub struct ExternalSolver {
    pub command: String,
    pub timeout: Duration,
}

impl CnfSolver for ExternalSolver {
    fn solve_cnf(&self, cnf: &Cnf) -> Result<SatOutcome, SatError> {
        let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
        file.write_all(cnf.to_dimacs().as_bytes())?;
        file.flush()?;
        let out = run_shell(&fill_template(&self.command, file.path()), self.timeout)?;
        parse_dimacs_answer(&out, cnf.num_vars)
    }
}

/// Reads a SAT-competition style answer.
pub fn parse_dimacs_answer(text: &str, num_vars: usize) -> Result<SatOutcome, SatError> {
    let mut status = None;
    let mut model = vec![false; num_vars + 1];
    for line in text.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix("s ") {
            status = match rest.trim() {
                "SATISFIABLE" => Some(true),
                "UNSATISFIABLE" => Some(false),
                other => return Err(SatError::Answer(format!("status `{other}`"))),
            };
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| SatError::Answer(format!("bad literal `{tok}`")))?;
                let var = lit.unsigned_abs() as usize;
                if var == 0 {
                    continue;
                }
                if var > num_vars {
                    return Err(SatError::Answer(format!("variable {var} out of range")));
                }
                model[var] = lit > 0;
            }
        }
    }
    match status {
        Some(true) => Ok(SatOutcome::Sat(model)),
        Some(false) => Ok(SatOutcome::Unsat),
        None => Err(SatError::Answer("no status line".into())),
    }
}
