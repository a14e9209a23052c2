//! `bsquad`: integrate functions and reproduce convergence tables from the command line.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 invalid request, 3 integrand
//! evaluation failure.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use bspline_quad::{ParseError, QuadError};

#[derive(Debug)]
pub enum CliError {
    /// Malformed flags, config, expression or rule parameters.
    Spec(String),
    /// The integrand could not be evaluated at some node.
    Eval(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Spec(_) => 2,
            CliError::Eval(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Spec(m) | CliError::Eval(m) | CliError::Io(m) => m,
        }
    }

    pub fn parse(src: &str, e: &ParseError) -> CliError {
        CliError::Spec(format!(
            "invalid function: {e}\n  {src}\n  {:>width$}",
            "^",
            width = e.position + 1
        ))
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        if e.is_evaluation_failure() {
            CliError::Eval(e.to_string())
        } else {
            CliError::Spec(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
