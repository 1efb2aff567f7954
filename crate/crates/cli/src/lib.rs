//! Library side of the `vncrit` binary: argument parsing, input schemas,
//! report envelopes and the end-to-end pipeline.
//!
//! Exit codes from [`run`]: 0 on success, 2 when the input is rejected
//! (error JSON on stderr), 1 on internal failure.

mod args;
mod commands;
pub mod csvio;
pub mod error;
pub mod files;
pub mod pipeline;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind as ClapKind;
use clap::Parser;
use serde_json::json;

pub use args::{Cli, Format};
pub use error::{CliError, ErrorKind};
pub use pipeline::paper_pipeline;
pub use report::{PaperPipelineReport, Report, SCHEMA};

fn write_error(stderr: &mut dyn Write, err: &CliError) -> i32 {
    let body = json!({ "schema": SCHEMA, "error": err });
    let _ = writeln!(stderr, "{body}");
    err.kind.exit_code()
}

fn clap_error(e: clap::Error) -> CliError {
    let kind = match e.kind() {
        ClapKind::InvalidSubcommand
        | ClapKind::MissingSubcommand
        | ClapKind::DisplayHelpOnMissingArgumentOrSubcommand => ErrorKind::UnknownCommand,
        _ => ErrorKind::BadFlag,
    };
    let rendered = e.render().to_string();
    let message = rendered
        .lines()
        .take_while(|l| !l.trim().is_empty())
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(" ")
        .trim_start_matches("error: ")
        .to_string();
    CliError::new(kind, message)
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let outcome = commands::dispatch(cli)?;
    for w in &outcome.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let bytes = match &outcome.csv {
        Some(csv) => csv.clone(),
        None => {
            let report = Report {
                schema: SCHEMA.into(),
                tool: report::ToolInfo::default(),
                command: outcome.command.into(),
                config: commands::resolved_config(cli, &outcome),
                seeds: outcome.seeds.clone(),
                timestamp: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                result: &outcome.result,
            };
            let mut text = serde_json::to_vec_pretty(&report)
                .map_err(|e| CliError::new(ErrorKind::Internal, e.to_string()))?;
            text.push(b'\n');
            text
        }
    };
    let io_err = |e: std::io::Error| CliError::new(ErrorKind::Internal, e.to_string());
    match &cli.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| {
            CliError::new(
                ErrorKind::BadFlag,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => stdout.write_all(&bytes).map_err(io_err),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
        Err(e) => return write_error(stderr, &clap_error(e)),
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => write_error(stderr, &e),
    }
}
