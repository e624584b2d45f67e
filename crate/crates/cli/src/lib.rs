//! Command-line front end: experiment presets reproducing the laboratory's
//! headline checks at desk scale, with reproducible manifests and CSV/JSON
//! artifacts.
//!
//! Every subcommand writes three files into `--out-dir`:
//! `<prefix>_manifest.json` (the resolved run description),
//! `<prefix>.csv` (the data table) and `<prefix>_summary.json`.
//! Exit codes: 0 success, 2 validation error, 3 budget overflow.

mod args;
mod commands;
mod out;

use clap::Parser;

use reclab_core::Error as CoreError;

pub use args::Cli;

/// Parse `argv` and run; returns the process exit code.
pub fn dispatch(argv: &[String]) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own message; usage problems are validation
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::run(argv, cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &CliError) -> u8 {
    match e {
        CliError::Core(CoreError::Budget(_)) => 3,
        _ => 2,
    }
}

/// CLI-level error: core failures plus IO and config problems.
#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Config(m) => write!(f, "config: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
