//! Command-line front end.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use avc_jsc::Error;

pub use args::Cli;
use args::Command;

/// Report format version written to every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Exit code of a successful run.
const OK: u8 = 0;
/// Exit code when a bound is infeasible or a rate plan has no headroom.
const INFEASIBLE: u8 = 1;
/// Exit code for unreadable or invalid input.
const INPUT_ERROR: u8 = 2;

pub fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let code = match &cli.command {
        Command::CheckSym(a) => commands::check_sym(a)?,
        Command::Bound(a) => commands::bound(a)?,
        Command::Simulate(a) => commands::simulate(a)?,
        Command::Reproduce(a) => commands::reproduce(a)?,
    };
    Ok(ExitCode::from(code))
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoFeasiblePoint(_) | Error::InsufficientHeadroom(_) => INFEASIBLE,
        Error::ExplosionGuard { .. } | Error::SizeOverflow { .. } | Error::Lp(_) => INFEASIBLE,
        _ => INPUT_ERROR,
    }
}
