//! `zcz`: construct, certify, inspect and simulate multiple ZCZ sequence families.
//!
//! Exit codes: 0 when every check passes, 2 when a certificate fails, 1 for
//! usage, parse and I/O errors. `ZCZ_THREADS` caps the worker pool.

mod construct;
mod report;
mod simulate;
mod spectrum;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "zcz",
    version,
    about = "Multiple ZCZ sequence sets from generalised Boolean functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a family, write it with a manifest and print its parameters.
    Construct(construct::Args),
    /// Certify an exported family.
    Verify(verify::Args),
    /// Dump every periodic correlation of an exported family as CSV.
    Spectrum(spectrum::Args),
    /// Run the QS-CDMA Monte-Carlo simulation described by a TOML config.
    Simulate(simulate::Args),
}

/// Result of a command that completed without I/O or usage errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("ZCZ_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|e| anyhow::anyhow!("ZCZ_THREADS={raw:?}: {e}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Construct(args) => construct::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Spectrum(args) => spectrum::run(args),
        Command::Simulate(args) => simulate::run(args),
    });
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
