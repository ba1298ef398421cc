//! `sensitivity`: measure Boolean functions and lattice colorings, run the
//! reductions between them and check the known inequalities.
//!
//! Exit status: 0 when every check passes, 1 when a mathematical check
//! fails (the report shows which), 2 on usage, input or resource errors.

mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::commands::Cli;
use crate::output::Report;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    match commands::run(&cli) {
        Ok(outcome) => {
            let report = Report::new(&argv[1..], outcome, start.elapsed());
            if let Err(e) = output::emit(&report, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                for c in report.checks.iter().filter(|c| !c.holds) {
                    eprintln!("{c}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
