mod args;
mod commands;
mod figures;
mod numfmt;
mod report;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Critical(a) => commands::critical(a),
        Command::Monodromy(a) => commands::monodromy(a),
        Command::Reduced(a) => commands::reduced(a),
        Command::Actions(a) => commands::actions(a),
        Command::Figures(a) => figures::figures(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
