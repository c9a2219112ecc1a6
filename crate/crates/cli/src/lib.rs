//! Command-line front end for `bvis-core`.
//!
//! `bvis` prints data to stdout as CSV (default) or JSON and logs to
//! stderr. Exit codes are listed in [`error::exit`].

pub mod args;
pub mod checks;
pub mod commands;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::{self, Write};
use std::time::Instant;

use clap::Parser;

use crate::args::{Cli, Format};
use crate::error::{exit, CliError, CliResult};

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("bvis: error: {e}");
            e.exit_code()
        }
    }
}

fn run_parsed(cli: &Cli) -> CliResult<i32> {
    let start = Instant::now();
    let outcome = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?
            .install(|| commands::execute(cli))?,
        None => commands::execute(cli)?,
    };
    let elapsed = start.elapsed().as_secs_f64();

    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.format {
        Format::Csv => outcome
            .record
            .write_csv(&mut out)
            .map_err(|e| CliError::Output(e.to_string()))?,
        Format::Json => {
            let text = serde_json::to_string_pretty(&outcome.record.to_json(elapsed))
                .map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out, "{text}").map_err(|e| CliError::Output(e.to_string()))?;
        }
    }
    eprintln!("bvis: {} finished in {elapsed:.3} s", outcome.record.command);
    if outcome.failed {
        eprintln!("bvis: verification failed");
        return Ok(exit::VERIFICATION);
    }
    Ok(exit::OK)
}
