mod args;
mod commands;

use std::fmt;
use std::process::ExitCode;

use aerial_core::Error;
use clap::Parser;

use crate::args::Cli;

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

/// Bad flag values detected after argument parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Config(_) | Error::ConflictingMark(_) | Error::OracleGuard { .. } => EXIT_USAGE,
                Error::NonFiniteLoss { .. } => EXIT_NUMERIC,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.opts.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match commands::run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
