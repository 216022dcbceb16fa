//! `logdiff` command-line front end.
//!
//! Exit codes: `0` success, `1` I/O failure, `2` invalid input or usage,
//! `3` numerical failure (Newton divergence).

mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_INVALID);
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::SampleExplicit(a) => commands::field::sample_explicit(a),
        Command::Simulate(a) => commands::field::simulate(a),
        Command::Diagnose(a) => commands::analysis::diagnose(a),
        Command::Osc(a) => commands::analysis::osc(a),
        Command::Audit(a) => commands::analysis::audit(a),
        Command::Lemma(a) => commands::lemma::lemma(a),
        Command::Constants(a) => commands::lemma::constants(a),
        Command::Hausdorff(a) => commands::hausdorff::hausdorff(a),
    }
}

/// `LOGDIFF_THREADS` caps the worker pool used by the library.
fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("LOGDIFF_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| anyhow::anyhow!("LOGDIFF_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<logdiff::Error>() {
            return match err {
                _ if err.is_numerical() => EXIT_NUMERICAL,
                logdiff::Error::Io(_) => EXIT_IO,
                _ => EXIT_INVALID,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_INVALID
}
