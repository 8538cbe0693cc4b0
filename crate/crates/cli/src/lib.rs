//! Command-line front end: argument parsing, measure presets and the
//! subcommand runners. [`run`] is what the binary calls; it never panics on
//! bad input and reports every failure as a JSON object on stderr.

pub mod args;
pub mod commands;
pub mod config;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{pretty, Output};
use config::{CliError, CliResult};

/// Exit code for a run whose checks failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for bad flags or unusable input.
pub const EXIT_USAGE: i32 = 2;

pub fn dispatch(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Table(a) => commands::table(a),
        Command::Verify(a) => verify::verify(a),
        Command::Roots(a) => commands::roots(a),
        Command::Projector(a) => commands::projector(a),
        Command::ThreeSubspace(a) => commands::three_subspace(a),
        Command::Moments(a) => commands::moments_cmd(a),
    }
}

/// Parses `argv`, runs the command and writes its output. Returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            let text = msg
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let text = text.trim_start_matches("error: ").to_string();
            let _ = write!(err, "{}", pretty(&CliError::Usage(text).to_json()));
            return EXIT_USAGE;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let _ = write!(out, "{}", o.text);
            if o.failures.is_empty() {
                0
            } else {
                let e = CliError::CheckFailed(format!("failed: {}", o.failures.join(", ")));
                let _ = write!(err, "{}", pretty(&e.to_json()));
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            let _ = write!(err, "{}", pretty(&e.to_json()));
            e.exit_code()
        }
    }
}
