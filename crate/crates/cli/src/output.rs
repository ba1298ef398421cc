use std::path::Path;
use std::time::Duration;

use sensitivity_core::report::Check;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// What a command produced, before it is wrapped in a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub theorem: Option<String>,
    /// Fingerprint of the primary input; `None` for parameter-only runs.
    pub fingerprint: Option<String>,
    pub results: Value,
    pub witnesses: Value,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
    pub threads: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
    pub fingerprint: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub results: Value,
    pub witnesses: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(args: &[String], outcome: Outcome, elapsed: Duration) -> Self {
        let fingerprint = outcome
            .fingerprint
            .unwrap_or_else(|| sensitivity_core::fingerprint(args.join(" ").as_bytes()));
        Report {
            schema_version: SCHEMA_VERSION,
            command: args.to_vec(),
            theorem: outcome.theorem,
            fingerprint,
            passed: outcome.checks.iter().all(|c| c.holds),
            checks: outcome.checks,
            results: outcome.results,
            witnesses: outcome.witnesses,
            timing: Timing { elapsed_ms: elapsed.as_millis(), threads: rayon::current_num_threads() },
        }
    }
}

pub fn emit(report: &Report, out: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    match out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
