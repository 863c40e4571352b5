mod args;
mod commands;
mod instance;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qmcbound_core::Error;

use crate::args::Cli;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Numerical(_) | Error::NotPsd { .. }) => EXIT_NUMERICAL,
        Some(_) => EXIT_VALIDATION,
        // Anything else is I/O around the result files.
        None => EXIT_VALIDATION,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::execute(&cli.command) {
        Ok(report) => {
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let mut out = std::io::stdout().lock();
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("serializable"))
            } else {
                write!(out, "{}", report.table)
            };
            if report.failed {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
