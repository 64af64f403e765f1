//! `tabrep` command-line tool.
//!
//! Exit status: 0 on success, 1 when the run failed or only partly
//! succeeded, 2 on usage errors (bad flags, bad config file, missing
//! inputs).

mod args;
mod commands;
mod lock;
mod provider;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, FileConfig};

/// An error in how the tool was invoked rather than in the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// How a command that ran to completion went.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Partial,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => commands::ingest(&a, &file),
        Command::Stats(a) => commands::stats(&a),
        Command::Chunk(a) => commands::chunk(&a, &file),
        Command::Embed(a) => commands::embed(&a, &file),
        Command::Index(a) => commands::index(&a, &file),
        Command::Query(a) => commands::query(&a, &file),
        Command::Evaluate(a) => commands::evaluate(&a, &file),
        Command::Grid(a) => commands::grid(&a, &file),
    }
}
