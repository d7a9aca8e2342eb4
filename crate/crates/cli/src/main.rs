//! `dioph`: command-line front end for the word-ball, polynomial-family,
//! covering and dimension computations of `dioph-core`.
//!
//! Exit status: 0 on success, 2 when a checked bound fails at the given
//! parameters, 1 on any error (including bad flags).

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match &cli.command {
        Command::Ball(a) => commands::ball(a, cli.seed),
        Command::Beta(a) => commands::beta(a, cli.seed),
        Command::Family(a) => commands::family(a, cli.seed),
        Command::Jensen(a) => commands::jensen(a, cli.seed),
        Command::Cover(a) => commands::cover(a, cli.seed),
        Command::Tail(a) => commands::tail(a, cli.seed),
        Command::Scan(a) => commands::scan(a, cli.seed),
    };
    match outcome {
        Ok(commands::Outcome::Ok) => ExitCode::SUCCESS,
        Ok(commands::Outcome::BoundViolated(what)) => {
            eprintln!("bound violated: {what}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
