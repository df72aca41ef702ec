mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;
use ssdo_te::TeError;

use args::{Cli, Command, ExperimentCommand};

/// Failure of one CLI invocation, mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Te(#[from] TeError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Te(e) => match e.root() {
                TeError::NoPath { .. } | TeError::Disconnects { .. } | TeError::NeverFeasible { .. } => 4,
                _ => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Solve(a) => commands::solve(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Experiment(ExperimentCommand::Failures(a)) => commands::failures(a),
        Command::Experiment(ExperimentCommand::Perturb(a)) => commands::perturb_sweep(a),
        Command::Perturb(a) => commands::perturb(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
