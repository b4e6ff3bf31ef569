//! Command-line layer over `qnet-core`: argument parsing, experiment
//! drivers, output rendering, and the self-test suite.
//!
//! The binary (`qnet`) is a thin wrapper around [`run`], which returns the
//! process exit code: 0 success, 1 configuration or parse error, 2 I/O
//! error, 3 validation failure.

pub mod args;
pub mod commands;
pub mod error;
pub mod matrix_file;
pub mod output;
pub mod validate;

use clap::error::ErrorKind;
use clap::Parser;

/// Parse argv and run the selected command; returns the exit code.
pub fn run() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap routes help/version to stdout and errors to stderr.
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
