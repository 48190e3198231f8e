//! Satisfiability checking for linear temporal logic over finite traces.
//!
//! A formula is expanded on the fly into a transition system whose states
//! are formulas and whose edges are labelled by literal conjunctions. A
//! formula is satisfiable iff some reachable state has an outgoing edge
//! whose label, read as a one-letter trace, already satisfies the state.
//! SAT-based shortcuts over propositional "obligation" abstractions decide
//! many formulas without exploring the system at all.

pub mod bench_gen;
pub mod checker;
pub mod cli;
pub mod formula;
pub mod ltl_bridge;
pub mod normal_form;
pub mod obligations;
pub mod oracle;
pub mod process;
pub mod sat;
pub mod syntax;
pub mod transition_system;

pub use checker::{check, check_dfs, CheckError, CheckOptions, CheckResult, Technique, Verdict};
pub use formula::{Atom, Closure, Formula, FormulaKind, Literal, PropositionalFormula};
pub use syntax::{parse, to_nnf, Expr, ParseError};
