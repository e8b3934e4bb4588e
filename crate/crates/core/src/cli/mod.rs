//! Command-line front end: `lyap <command> [flags]`.
//!
//! Exit codes: 0 on success, 1 when a `verify` check fails, 2 for invalid
//! input (bad flags, config or coefficients), 3 for numerical failures.

mod args;
mod commands;
mod config;
mod report;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use config::{load_config, RunConfig};
pub use report::{fmt10, Outcome};

use crate::error::{Error, Result};

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() || matches!(e, Error::Io(_)) {
        2
    } else {
        3
    }
}

fn dispatch(name: &str, cfg: &RunConfig) -> Result<Outcome> {
    match name {
        "estimate" => commands::estimate(cfg),
        "tree" => commands::tree(cfg),
        "closed-form" => commands::closed_form(cfg),
        "series" => commands::series(cfg),
        "verify" => commands::verify(cfg),
        "compare" => commands::compare(cfg),
        "pressure" => commands::pressure(cfg),
        "render" => commands::render(cfg),
        "normalize" => commands::normalize(cfg),
        other => unreachable!("unknown command {other}"),
    }
}

/// Runs one command and returns whether every check passed.
pub fn execute(command: &Command) -> Result<bool> {
    let flags = command.flag_config()?;
    let cfg = match &command.shared().config {
        Some(path) => load_config(path)?.overridden_by(flags),
        None => flags,
    };
    let name = command.name();
    let outcome = match cfg.threads {
        Some(0) => return Err(Error::invalid("threads", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?
            .install(|| dispatch(name, &cfg))?,
        None => dispatch(name, &cfg)?,
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    if let Some(path) = &cfg.output {
        report::write_report(path, name, &cfg, &outcome)?;
    }
    if let Some(path) = &cfg.table {
        outcome.table.write(path)?;
    }
    Ok(outcome.passed)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
