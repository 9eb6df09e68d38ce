//! Config-driven experiments behind the `qlab` executable.
//!
//! A config is a flat `key = value` file naming one experiment kind. Running
//! it writes a CSV report and `<output>.summary.json` beside it. Sample
//! inputs are drawn sequentially from a ChaCha8 stream seeded by `seed`
//! before any parallel work starts, so reports do not depend on the thread
//! count.

mod cli;
mod config;
mod kinds;
mod report;

use std::path::Path;
use std::time::Instant;

pub use cli::{main_with_args, EXIT_FAILURE, EXIT_INVALID_CONFIG, EXIT_PASS};
pub use config::{validate_config, validate_config_at, ExperimentConfig, GeometryChoice, Kind, Params};
pub use report::{summary_path, write_atomic, Cell, Report, Summary};

use crate::error::Error;

/// What one experiment produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Summary,
    /// `None` when the computation itself failed.
    pub report: Option<Report>,
    /// Text printed on stdout (the product mode list for `nctorus-star`).
    pub stdout: Option<String>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.summary.pass
    }

    pub fn exit_code(&self) -> u8 {
        if self.pass() {
            EXIT_PASS
        } else {
            EXIT_FAILURE
        }
    }
}

/// Worker count from `QLAB_THREADS`, default 1.
pub fn threads_from_env() -> Result<usize, String> {
    match std::env::var("QLAB_THREADS") {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("QLAB_THREADS must be a positive integer, got `{s}`")),
        },
    }
}

/// Runs the experiment without touching the filesystem.
pub fn execute(config: &ExperimentConfig, threads: usize) -> Outcome {
    let start = Instant::now();
    let result = kinds::build_pool(threads).and_then(|pool| kinds::evaluate(config, &pool));
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let (report, pass, max_error, failure, stdout) = match result {
        Ok(ev) => (Some(ev.report), ev.pass, ev.max_error, ev.failure, ev.stdout),
        Err(e) => (None, false, f64::NAN, Some(describe(&e)), None),
    };
    Outcome {
        summary: Summary {
            name: config.name.clone(),
            kind: config.kind.to_string(),
            pass,
            max_error,
            runtime_ms,
            failure,
        },
        report,
        stdout,
    }
}

fn describe(e: &Error) -> String {
    format!("computation failed: {e}")
}

/// Runs the experiment and writes the CSV report (when the computation
/// completed) and the JSON summary.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> std::io::Result<Outcome> {
    let outcome = execute(config, threads);
    write_outputs(&config.output, &outcome)?;
    Ok(outcome)
}

fn write_outputs(output: &Path, outcome: &Outcome) -> std::io::Result<()> {
    if let Some(report) = &outcome.report {
        write_atomic(output, &report.to_csv())?;
    }
    let mut json = serde_json::to_string_pretty(&outcome.summary).map_err(std::io::Error::other)?;
    json.push('\n');
    write_atomic(&summary_path(output), &json)
}
