//! Subcommands, verification suites and report plumbing behind the `su21`
//! binary.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;

use clap::Parser;
use su21::endoscopy::EndoscopyError;
use su21::orbital::OrbitalError;
use thiserror::Error;

/// Exit code when every check passes.
pub const EXIT_PASS: u8 = 0;
/// Exit code when a verification fails or a computation errors out.
pub const EXIT_FAIL: u8 = 1;
/// Exit code for malformed invocations and inputs.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Orbital(#[from] OrbitalError),
    #[error(transparent)]
    Endoscopy(#[from] EndoscopyError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match commands::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests exit 0, malformed arguments 2.
            if !cfg!(test) {
                let _ = e.print();
            } else if e.use_stderr() {
                eprint!("{e}");
            } else {
                print!("{e}");
            }
            return u8::try_from(e.exit_code()).unwrap_or(EXIT_USAGE);
        }
    };
    match commands::run(cli) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
