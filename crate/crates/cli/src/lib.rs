//! Library side of the `clt` binary: configuration parsing, dispatch and
//! output. Exit codes are 0 on success, 1 on a computation failure and 2
//! on a usage error.

// Range checks are written `!(x > a)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;

pub use commands::{execute, Report};
pub use config::{parse_config, CommandName, OutputFormat, RunConfig, Task};
pub use error::CliError;

/// Renders the primary output of a report in the requested format.
pub fn render(report: &Report, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => output::to_json_string(&report.json),
        OutputFormat::Text => Ok(match &report.table {
            Some(table) if !table.rows.is_empty() => format!("{}{}", output::to_text(&without_arrays(&report.json)), table.to_text()),
            _ => output::to_text(&report.json),
        }),
        OutputFormat::Csv => report
            .table
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command has no tabular output".into()))?
            .to_csv(),
    }
}

/// Scalars of a document, for the summary above a text table.
fn without_arrays(value: &serde_json::Value) -> serde_json::Value {
    match value {
        serde_json::Value::Object(map) => serde_json::Value::Object(
            map.iter()
                .filter(|(_, v)| !v.is_array())
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        ),
        other => other.clone(),
    }
}

/// Runs the command, writing output to the configured path or stdout.
/// Returns the report on success.
pub fn run_report(config: &RunConfig) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let report = pool.install(|| execute(&config.task))?;
    let text = render(&report, config.output_format)?;
    match &config.output_path {
        Some(path) => output::write_atomic(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    if let (Task::Moment { trace_path: Some(path), .. }, Some(table)) = (&config.task, &report.table) {
        output::write_atomic(path, &table.to_csv()?)?;
    }
    match &report.failure {
        Some(message) => Err(CliError::Tolerance(message.clone())),
        None => Ok(report),
    }
}

/// Runs a validated config and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    match run_report(config) {
        Ok(_) => 0,
        Err(e) => {
            report_error(&e, config.output_format);
            e.exit_code()
        }
    }
}

/// Prints an error to stderr; in JSON mode as `{"error": {"code", "message"}}`.
pub fn report_error(error: &CliError, format: OutputFormat) {
    let message = error.to_string();
    if format == OutputFormat::Json && !matches!(error, CliError::Help(_) | CliError::Usage(_)) {
        let doc = serde_json::json!({ "error": { "code": error.code(), "message": message } });
        eprintln!("{doc}");
    } else if matches!(error, CliError::Help(_)) {
        print!("{message}");
    } else {
        eprintln!("{message}");
    }
}

/// Best-effort format lookup for reporting errors raised before parsing succeeds.
fn requested_format(argv: &[String]) -> OutputFormat {
    let value = argv
        .iter()
        .position(|a| a == "--format")
        .and_then(|i| argv.get(i + 1).map(String::as_str))
        .or_else(|| argv.iter().find_map(|a| a.strip_prefix("--format=")));
    match value {
        Some("text") => OutputFormat::Text,
        Some("csv") => OutputFormat::Csv,
        _ => OutputFormat::Json,
    }
}

/// Parses `argv` (without the program name), runs it and returns the exit
/// code. Panics inside the numerics are caught and reported as exit 1.
pub fn main_with_args(argv: &[String]) -> i32 {
    let outcome = std::panic::catch_unwind(|| match parse_config(argv, None) {
        Ok(config) => run(&config),
        Err(e) => {
            report_error(&e, requested_format(argv));
            e.exit_code()
        }
    });
    outcome.unwrap_or_else(|_| {
        eprintln!("{}", serde_json::json!({ "error": { "code": "internal", "message": "internal error" } }));
        1
    })
}
