//! Command-line front end and scenario runner.
//!
//! Exit codes: 0 success, 1 task or check failure, 2 usage, I/O or parse error.

pub mod golden;
mod run;
mod scenario;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use run::{replay_scenario, run_scenario, task_rng, Report, Status, TaskReport, Totals, Versions, PASS_FIDELITY, REPORT_SCHEMA};
pub use scenario::{parse_scenario, GateSpec, GoldenName, NamedGate, Protocol, Scenario, Task, DEFAULT_TRIALS};

use crate::cost::{cost_profile, cost_threshold, monte_carlo_cost};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "modnet", version, about = "Modular quantum architecture simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario file and print (or write) its JSON report.
    Run {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement cost of exp(iθZZ) by both routes.
    AnalyzeCost {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Angle below which the iterative route costs less than one ebit.
    Threshold,
    /// Run a built-in golden trace.
    Golden {
        #[arg(value_enum)]
        trace: GoldenArg,
    },
    /// Run the built-in property suite.
    Verify,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GoldenArg {
    AppendixE,
}

/// Entry point with injectable arguments and output streams.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> crate::Result<i32> {
    match command {
        Command::Run { file, seed, trials, out: path } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| crate::Error::Scenario(format!("{}: {e}", file.display())))?;
            let mut scenario = parse_scenario(&text)?;
            if let Some(s) = seed {
                scenario.seed = s;
            }
            if let Some(t) = trials {
                if t == 0 {
                    return Err(crate::Error::Scenario("--trials must be at least 1".into()));
                }
                scenario.trials = t;
            }
            let report = run_scenario(&scenario);
            let json = report.to_json();
            match path {
                Some(p) => std::fs::write(&p, json + "\n")?,
                None => writeln!(out, "{json}")?,
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::AnalyzeCost { theta, trials, seed } => {
            if trials == 0 {
                return Err(crate::Error::Scenario("--trials must be at least 1".into()));
            }
            let profile = cost_profile(theta);
            let mc = monte_carlo_cost(theta, trials, seed)?;
            let doc = json!({
                "theta": theta,
                "expected_cost": profile.expected_cost,
                "deterministic_cost": profile.deterministic_cost,
                "preferred": profile.preferred,
                "per_round_cost": profile.per_round_cost,
                "monte_carlo": mc,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
            Ok(EXIT_OK)
        }
        Command::Threshold => {
            let t = cost_threshold();
            writeln!(out, "{t:.9}")?;
            Ok(EXIT_OK)
        }
        Command::Golden { trace: GoldenArg::AppendixE } => {
            let g = golden::appendix_e(0)?;
            for c in &g.checks {
                writeln!(
                    out,
                    "round {}: {} observed {:?}",
                    c.round,
                    if c.passed { "ok" } else { "MISMATCH" },
                    c.observed
                )?;
            }
            writeln!(
                out,
                "appendix-e: {} ({} rounds, fidelity {:.12})",
                if g.passed { "passed" } else { "failed" },
                g.rounds,
                g.fidelity
            )?;
            Ok(if g.passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Verify => {
            let checks = crate::verify::run_all();
            for c in &checks {
                writeln!(out, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}
