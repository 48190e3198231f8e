//! Links to infinite-trace LTL: the `Tail` encoding of a finite-trace
//! formula, and an unsat shortcut that asks an external LTL solver.
//!
//! Over formulas without weak next, finite-trace satisfiability implies
//! infinite-trace satisfiability, so an LTL "unsat" answer for the formula
//! itself is an LTLf "unsat" answer.

use std::collections::BTreeSet;
use std::io::Write as _;
use std::time::Duration;

use thiserror::Error;

use crate::formula::{Formula, FormulaKind};
use crate::process::{fill_template, run_shell, ProcessError};
use crate::syntax::Expr;

/// True iff no weak next occurs in `f`.
pub fn is_xw_free(f: &Formula) -> bool {
    !f.any_node(&mut |g| matches!(g.kind(), FormulaKind::WeakNext(_)))
}

/// Name of the fresh marker atom: `Tail`, suffixed if an atom already uses it.
pub fn tail_name(f: &Formula) -> String {
    let names: BTreeSet<String> = f.atoms().iter().map(|a| a.name().to_string()).collect();
    let mut name = String::from("Tail");
    let mut i = 0;
    while names.contains(&name) {
        i += 1;
        name = format!("Tail_{i}");
    }
    name
}

/// The LTL formula `Tail & (Tail U G(!Tail)) & t(f)`, satisfiable over
/// infinite words iff `f` is over finite traces.
pub fn translate_to_ltl(f: &Formula) -> Expr {
    let tail = tail_name(f);
    let prefix = Expr::and(
        Expr::atom(&tail),
        Expr::until(Expr::atom(&tail), Expr::globally(Expr::negation(Expr::atom(&tail)))),
    );
    Expr::and(prefix, Translator { tail: &tail }.t(f))
}

struct Translator<'a> {
    tail: &'a str,
}

impl Translator<'_> {
    fn tail(&self) -> Expr {
        Expr::atom(self.tail)
    }

    fn t(&self, f: &Formula) -> Expr {
        match f.kind() {
            FormulaKind::True => Expr::True,
            FormulaKind::False => Expr::False,
            FormulaKind::Lit(l) => {
                let a = Expr::atom(&l.atom().name());
                if l.is_positive() {
                    a
                } else {
                    Expr::negation(a)
                }
            }
            FormulaKind::And(cs) => self.fold(cs, Expr::and),
            FormulaKind::Or(cs) => self.fold(cs, Expr::or),
            FormulaKind::Next(g) => Expr::next(Expr::and(self.tail(), self.t(g))),
            FormulaKind::Until(l, r) => Expr::until(self.t(l), Expr::and(self.tail(), self.t(r))),
            // N g = !X !g and l R r = !(!l U !r); the inner negations are
            // pushed into the operands so every node costs a bounded amount.
            FormulaKind::WeakNext(g) => negate(self.t(&Formula::next(g.negate()))),
            FormulaKind::Release(l, r) => {
                negate(self.t(&Formula::until(l.negate(), r.negate())))
            }
        }
    }

    fn fold(&self, cs: &[Formula], join: fn(Expr, Expr) -> Expr) -> Expr {
        let mut it = cs.iter().map(|c| self.t(c));
        let first = it.next().expect("connectives have children");
        it.fold(first, join)
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Not(inner) => *inner,
        e => Expr::negation(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LtlAnswer {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Error)]
pub enum LtlSolverError {
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("could not write the formula file: {0}")]
    Io(#[from] std::io::Error),
    #[error("no sat/unsat line in solver output")]
    NoAnswer,
}

/// An infinite-trace LTL satisfiability oracle.
pub trait ExternalLtlSolver: Send + Sync {
    fn solve_ltl(&self, f: &Formula) -> Result<LtlAnswer, LtlSolverError>;
}

/// Runs a shell command on a formula file. `{file}` in the command is
/// replaced by the file path; the first output line starting with `sat` or
/// `unsat` (any case) is the answer.
#[derive(Clone, Debug)]
pub struct CommandLtlSolver {
    pub command: String,
    pub timeout_ms: u64,
    pub enabled: bool,
}

impl CommandLtlSolver {
    pub fn new(command: impl Into<String>) -> Self {
        CommandLtlSolver {
            command: command.into(),
            timeout_ms: 10_000,
            enabled: true,
        }
    }
}

impl ExternalLtlSolver for CommandLtlSolver {
    fn solve_ltl(&self, f: &Formula) -> Result<LtlAnswer, LtlSolverError> {
        if !self.enabled {
            return Ok(LtlAnswer::Unknown);
        }
        let mut file = tempfile::Builder::new().suffix(".ltl").tempfile()?;
        writeln!(file, "{f}")?;
        file.flush()?;
        let out = run_shell(
            &fill_template(&self.command, file.path()),
            Duration::from_millis(self.timeout_ms),
        )?;
        parse_ltl_answer(&out).ok_or(LtlSolverError::NoAnswer)
    }
}

pub fn parse_ltl_answer(text: &str) -> Option<LtlAnswer> {
    text.lines().find_map(|line| {
        let line = line.trim_start().to_ascii_lowercase();
        if line.starts_with("unsat") {
            Some(LtlAnswer::Unsat)
        } else if line.starts_with("sat") {
            Some(LtlAnswer::Sat)
        } else {
            None
        }
    })
}

/// Why a formula was declared unsatisfiable without search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsatEvidence {
    pub formula: Formula,
}

/// Asks `solver` about `f` read as an LTL formula. Only an unambiguous
/// "unsat" yields evidence; formulas with weak next are never submitted.
pub fn external_unsat(
    f: &Formula,
    solver: &dyn ExternalLtlSolver,
) -> Result<Option<UnsatEvidence>, LtlSolverError> {
    if !is_xw_free(f) {
        return Ok(None);
    }
    Ok(match solver.solve_ltl(f)? {
        LtlAnswer::Unsat => Some(UnsatEvidence { formula: f.clone() }),
        LtlAnswer::Sat | LtlAnswer::Unknown => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn weak_next_detection() {
        assert!(is_xw_free(&p("G (a U b)")));
        assert!(!is_xw_free(&p("N a")));
        assert!(!is_xw_free(&p("X (N a)")));
        // !X a is N !a after normalization.
        assert!(!is_xw_free(&p("!X a")));
    }

    #[test]
    fn goldens() {
        assert_eq!(translate_to_ltl(&p("p")).to_string(), "Tail & (Tail U G(!Tail)) & p");
        assert_eq!(
            translate_to_ltl(&p("X a")).to_string(),
            "Tail & (Tail U G(!Tail)) & X(Tail & a)"
        );
        assert_eq!(
            translate_to_ltl(&p("a U b")).to_string(),
            "Tail & (Tail U G(!Tail)) & (a U (Tail & b))"
        );
    }

    #[test]
    fn dualities() {
        assert_eq!(
            translate_to_ltl(&p("N a")).to_string(),
            "Tail & (Tail U G(!Tail)) & !(X(Tail & !a))"
        );
        assert_eq!(
            translate_to_ltl(&p("a R b")).to_string(),
            "Tail & (Tail U G(!Tail)) & !(!a U (Tail & !b))"
        );
    }

    #[test]
    fn marker_is_renamed_on_collision() {
        let out = translate_to_ltl(&p("Tail & X Tail_1")).to_string();
        assert!(out.starts_with("Tail_2 & (Tail_2 U G(!Tail_2))"), "{out}");
    }

    #[test]
    fn output_parses_back() {
        for s in ["G (a U b)", "N (a R X b)", "a & F !a"] {
            let text = translate_to_ltl(&p(s)).to_string();
            assert!(parse(&text).is_ok(), "{text}");
        }
    }

    #[test]
    fn answer_lines() {
        assert_eq!(parse_ltl_answer("log\nUNSAT\nsat"), Some(LtlAnswer::Unsat));
        assert_eq!(parse_ltl_answer("  satisfiable"), Some(LtlAnswer::Sat));
        assert_eq!(parse_ltl_answer("unsatisfiable"), Some(LtlAnswer::Unsat));
        assert_eq!(parse_ltl_answer("maybe"), None);
    }

    struct Always(LtlAnswer);

    impl ExternalLtlSolver for Always {
        fn solve_ltl(&self, _: &Formula) -> Result<LtlAnswer, LtlSolverError> {
            Ok(self.0)
        }
    }

    #[test]
    fn evidence_only_on_unsat() {
        let f = p("G a & F !a");
        assert!(external_unsat(&f, &Always(LtlAnswer::Unsat)).unwrap().is_some());
        assert!(external_unsat(&f, &Always(LtlAnswer::Sat)).unwrap().is_none());
        assert!(external_unsat(&p("N a"), &Always(LtlAnswer::Unsat)).unwrap().is_none());
    }

    #[test]
    fn command_adapter() {
        let unsat = CommandLtlSolver::new("cat {file} > /dev/null && echo unsat");
        assert_eq!(unsat.solve_ltl(&p("G a & F !a")).unwrap(), LtlAnswer::Unsat);
        let disabled = CommandLtlSolver {
            enabled: false,
            ..unsat
        };
        assert_eq!(disabled.solve_ltl(&p("a")).unwrap(), LtlAnswer::Unknown);
        let silent = CommandLtlSolver::new("true");
        assert!(matches!(silent.solve_ltl(&p("a")), Err(LtlSolverError::NoAnswer)));
        let broken = CommandLtlSolver::new("exit 3");
        assert!(broken.solve_ltl(&p("a")).is_err());
    }

    #[test]
    fn command_sees_the_formula() {
        let echo = CommandLtlSolver::new("grep -q 'a U b' {file} && echo sat");
        assert_eq!(echo.solve_ltl(&p("a U b")).unwrap(), LtlAnswer::Sat);
    }
}
