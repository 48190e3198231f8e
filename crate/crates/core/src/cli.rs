//! Command-line front end. [`run`] takes the argument list and output
//! streams so it can be driven from tests.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench_gen::{
    case_file_text, default_pool, global_pool, global_random_conjunction, load_dir,
    random_conjunction, run_suite, SuiteOptions,
};
use crate::checker::{check, is_accepting, CheckOptions};
use crate::formula::Formula;
use crate::ltl_bridge::{translate_to_ltl, CommandLtlSolver};
use crate::obligations::obligations;
use crate::oracle::{evaluate, Trace};
use crate::sat::{ExternalSolver, SatBackend};
use crate::syntax::formula_from_file_text;
use crate::transition_system::TransitionSystem;

#[derive(Parser, Debug)]
#[command(name = "ltlf-check", version, about = "Satisfiability checking for LTL over finite traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability; exits 10 on SAT, 20 on UNSAT.
    Check {
        /// Formula file, or `-` for stdin.
        file: PathBuf,
        #[command(flatten)]
        strategy: Strategy,
        /// Print the versioned JSON record.
        #[arg(long)]
        json: bool,
        /// Include elapsed time in the JSON record.
        #[arg(long, requires = "json")]
        timing: bool,
    },
    /// Print the equisatisfiable infinite-trace LTL formula.
    Translate { file: PathBuf },
    /// Print the transition system in DOT.
    Dot {
        file: PathBuf,
        /// Expand every reachable state instead of only the initial one.
        #[arg(long)]
        expand_all: bool,
        /// Print the JSON dump instead of DOT.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a trace such as `a=1,b=0; a=0,b=1`.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        trace: String,
    },
    /// Print the off, ofr and ofg obligation formulas.
    Obligations { file: PathBuf },
    /// Emit random conjunction formulas.
    Gen {
        /// Use global patterns and merge the result into one G.
        #[arg(long)]
        global: bool,
        /// Number of conjuncts.
        #[arg(short)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Number of formulas; formula i uses seed + i.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Write one file per formula instead of printing.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check every formula file in a directory and report.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        strategy: Strategy,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// JSON report instead of CSV.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct Strategy {
    #[arg(long)]
    no_off: bool,
    #[arg(long)]
    no_ofg: bool,
    /// External LTL solver command for the unsat shortcut; `{file}` is the
    /// formula file.
    #[arg(long)]
    ofp_cmd: Option<String>,
    /// External DIMACS solver command; `{file}` is the CNF file.
    #[arg(long)]
    sat_cmd: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    budget_states: usize,
    /// Per-formula time limit in milliseconds.
    #[arg(long, default_value_t = 60_000)]
    timeout: u64,
}

impl Strategy {
    fn options(&self) -> CheckOptions {
        let timeout = Duration::from_millis(self.timeout);
        let mut o = CheckOptions {
            off: !self.no_off,
            ofg: !self.no_ofg,
            ..CheckOptions::default()
        };
        o.budget.max_states = self.budget_states;
        o.budget.timeout = timeout;
        if let Some(cmd) = &self.ofp_cmd {
            o.ofp = Some(Arc::new(CommandLtlSolver {
                command: cmd.clone(),
                timeout_ms: self.timeout,
                enabled: true,
            }));
        }
        if let Some(cmd) = &self.sat_cmd {
            o.sat = SatBackend::External(ExternalSolver {
                command: cmd.clone(),
                timeout,
            });
        }
        o
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read_formula(path: &Path, stdin: &mut dyn Read) -> Result<Formula, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?
    };
    formula_from_file_text(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match execute(cli.command, stdin, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(command: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check {
            file,
            strategy,
            json,
            timing,
        } => {
            let f = read_formula(&file, stdin)?;
            let r = check(&f, &strategy.options())?;
            if json {
                writeln!(out, "{}", r.to_json(timing))?;
            } else {
                writeln!(out, "{}", r.verdict)?;
                if let Some(w) = &r.witness {
                    if w.alphabet().is_empty() {
                        writeln!(out, "witness: {} letter(s) over no atoms", w.len())?;
                    } else {
                        writeln!(out, "witness: {w}")?;
                    }
                }
                writeln!(out, "technique: {}", r.technique)?;
            }
            Ok(r.exit_code())
        }
        Command::Translate { file } => {
            let f = read_formula(&file, stdin)?;
            writeln!(out, "{}", translate_to_ltl(&f))?;
            Ok(0)
        }
        Command::Dot {
            file,
            expand_all,
            json,
        } => {
            let f = read_formula(&file, stdin)?;
            let mut ts = TransitionSystem::new(f.clone());
            if expand_all {
                if !ts.expand_all(1_000_000) {
                    return Err(Failure("more than 1000000 states".into()));
                }
            } else {
                ts.successors(&f);
            }
            let accepting = |s: &Formula| is_accepting(s).is_some();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&ts.to_json(&accepting))?)?;
            } else {
                write!(out, "{}", ts.export_dot(&accepting))?;
            }
            Ok(0)
        }
        Command::Oracle { file, trace } => {
            let f = read_formula(&file, stdin)?;
            let trace = Trace::parse(&trace)?;
            writeln!(out, "{}", evaluate(&trace, &f)?)?;
            Ok(0)
        }
        Command::Obligations { file } => {
            let f = read_formula(&file, stdin)?;
            let o = obligations(&f);
            writeln!(out, "off: {}\nofr: {}\nofg: {}", o.off, o.ofr, o.ofg)?;
            Ok(0)
        }
        Command::Gen {
            global,
            n,
            seed,
            count,
            out_dir,
        } => {
            if n == 0 {
                return Err(Failure("-n must be at least 1".into()));
            }
            let pool = if global { global_pool() } else { default_pool() };
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir)?;
            }
            for s in seed..seed + count {
                let f = if global {
                    global_random_conjunction(n, s, &pool)?
                } else {
                    random_conjunction(n, s, &pool)
                };
                match &out_dir {
                    Some(dir) => {
                        let kind = if global { "global" } else { "random" };
                        let path = dir.join(format!("{kind}-n{n}-s{s}.ltlf"));
                        std::fs::write(path, case_file_text(n, s, &f))?;
                    }
                    None => writeln!(out, "{f}")?,
                }
            }
            Ok(0)
        }
        Command::Bench {
            dir,
            strategy,
            jobs,
            json,
        } => {
            let cases = load_dir(&dir)?;
            let options = SuiteOptions {
                check: strategy.options(),
                timeout: Duration::from_millis(strategy.timeout),
                jobs,
            };
            let report = run_suite(&cases, &options);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json())?)?;
            } else {
                write!(out, "{}", report.to_csv())?;
            }
            Ok(0)
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdin(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    )
}
