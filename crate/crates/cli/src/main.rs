//! `vesselguide` command-line interface.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 batch finished with
//! failures.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Guide(a) => commands::guide::run(a),
        Command::Batch(a) => commands::batch::run(a),
        Command::Eval(a) => commands::eval::run(a),
        Command::Synth(a) => commands::synth::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
