mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};
use error::CliError;

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Price(a) => commands::price(a)?.write(a.output.out.as_deref(), a.output.json),
        Command::CalibrateRho(a) => commands::calibrate(a)?.write(a.output.out.as_deref(), a.output.json),
        Command::DriftGrid(a) => commands::drift_grid(a)?.write(a.output.out.as_deref(), a.output.json),
        Command::Bench(a) => commands::bench(a)?.write(a.output.out.as_deref(), a.output.json),
        Command::Synthetic(a) => {
            let text = commands::synthetic(a)? + "\n";
            match &a.out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcoll: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
