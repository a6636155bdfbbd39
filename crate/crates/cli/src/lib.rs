//! Command-line runner for the vortex-street laboratory.
//!
//! Exit codes: 0 on success, 1 on a validation error (bad flag, parameter,
//! config or output path), 2 on a numerical failure (non-convergence,
//! degeneracy, collision). Errors are written to standard error as one JSON
//! object.

// `!(x < y)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod render;
pub mod settings;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::{CliError, EXIT_NUMERICAL, EXIT_VALIDATION};

use args::{Cli, Command};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "VLAB_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::validation(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    // a pool installed earlier in this process keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Field(a) => commands::field(&a),
        Command::Stagnation(a) => commands::stagnation(&a),
        Command::Separatrix(a) => commands::separatrix(&a),
        Command::Topology(a) => commands::topology(&a),
        Command::Equilibrium(a) => commands::equilibrium(&a),
        Command::Bifurcate(a) => commands::bifurcate(&a),
        Command::Curves(a) => commands::curves(&a),
        Command::Scaling(a) => commands::scaling(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Report(a) => commands::report(&a),
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_VALIDATION,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
