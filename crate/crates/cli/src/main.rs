//! flowlab: flow-variable analysis of 2D wave fields.

mod args;
mod commands;
mod profile;
mod report;

use clap::error::ErrorKind;
use clap::Parser;
use std::process::ExitCode;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::AlphaScan(a) => commands::run_alpha_scan(a),
        Command::Regularize(a) => commands::regularize(a),
        Command::Smolin(a) => commands::smolin(a),
        Command::Synth(a) => commands::synth(a),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = commands::classify_exit(&err);
            let kind = if code == 3 { "numerical" } else { "input-format" };
            let payload = serde_json::json!({
                "error": { "kind": kind, "message": format!("{err:#}") }
            });
            eprintln!("{payload}");
            ExitCode::from(code)
        }
    }
}
