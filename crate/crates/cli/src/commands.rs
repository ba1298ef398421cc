use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sensitivity_core::boolfn::{
    format_input_bits, l_block_sensitivity, measure, parse_input_bits, Block, BlockOptions, TruthTable,
    DEFAULT_CANDIDATE_CAP,
};
use sensitivity_core::bounds::{kk_constant, kk_constant_check};
use sensitivity_core::constructions::{rubinstein_f, rubinstein_g, slice_coloring, slice_group, sorted_function};
use sensitivity_core::lattice::{
    box_report, check_nontrivial, double_coloring, exact_report, repeated_coloring, sampled_report, ColorOracle, Coloring,
    ColoringReport, SampleRegion, DEFAULT_PROBE_CAP, DEFAULT_WIDTH_CAP,
};
use sensitivity_core::reductions::{coloring_to_function, function_to_coloring, ReductionCertificate, ReductionOptions};
use sensitivity_core::report::{Check, Relation};
use sensitivity_core::search::{exhaustive_scan, random_scan, SeparationRecord};
use sensitivity_core::verify::{self, parse_box, TheoremReport, VerifyOptions};
use sensitivity_core::{Error, Result};

use crate::output::Outcome;

#[derive(Debug, Parser)]
#[command(name = "sensitivity", version, about = "Sensitivity of Boolean functions and lattice colorings")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Boolean functions.
    #[command(subcommand)]
    Fn(FnCommand),
    /// Lattice colorings.
    #[command(subcommand)]
    Color(ColorCommand),
    /// Reductions between functions and colorings.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Theorem-level verification runs.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Separation search over small functions.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Bound constants.
    #[command(subcommand)]
    Bounds(BoundsCommand),
}

#[derive(Debug, Args)]
pub struct FunctionInput {
    /// Truth-table file (`n=<k>` header, then hex).
    #[arg(long, conflicts_with = "table")]
    file: Option<PathBuf>,
    /// Hex truth table, most significant digit first; needs --n.
    #[arg(long, requires = "n")]
    table: Option<String>,
    /// Number of variables.
    #[arg(long)]
    n: Option<u32>,
}

impl FunctionInput {
    fn given(&self) -> bool {
        self.file.is_some() || self.table.is_some()
    }

    fn load(&self) -> Result<TruthTable> {
        match (&self.file, &self.table, self.n) {
            (Some(path), _, _) => read(path)?.parse(),
            (None, Some(hex), Some(n)) => TruthTable::from_hex(n, hex),
            _ => Err(Error::InvalidArgument("give a function with --file or with --table and --n".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FunctionName {
    /// The 4-variable sorted-input example.
    SortedExample,
    /// OR of n copies of the n-bit pair function (needs --n).
    Rubinstein,
    /// The n-bit pair function (needs --n).
    RubinsteinG,
}

#[derive(Debug, Subcommand)]
pub enum FnCommand {
    /// s, s0, s1, bs and bs_l with witnesses.
    Measure {
        #[command(flatten)]
        input: FunctionInput,
        /// Also report bs_l for this l.
        #[arg(long)]
        l: Option<u32>,
        /// Largest block size considered for bs (default s(f)).
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Build a named function.
    Build {
        name: FunctionName,
        #[arg(long)]
        n: Option<usize>,
        /// Write the truth-table file here.
        #[arg(long)]
        target: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ColoringName {
    /// The slice coloring with n groups.
    Slices,
    /// One group of the slice coloring.
    SliceGroup,
    /// n copies of the slice group.
    RepeatedSliceGroup,
    /// The slice coloring with every point doubled.
    DoubledSlices,
}

#[derive(Debug, Subcommand)]
pub enum ColorCommand {
    /// Build a named coloring.
    Build {
        name: ColoringName,
        #[arg(long)]
        n: usize,
        /// Write the coloring file here.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// s, r, s^R, s^B and min-width of a coloring.
    Measure {
        /// Coloring file.
        #[arg(long)]
        spec: PathBuf,
        /// Color-query budget for scans.
        #[arg(long)]
        cap: Option<u128>,
        /// Scan the box lo:hi on every axis (lower bounds only).
        #[arg(long = "box")]
        box_range: Option<String>,
        /// Sample this many random points (lower bounds only).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReduceCommand {
    /// Coloring from disjoint sensitive blocks of a function.
    FnToColor {
        #[command(flatten)]
        input: FunctionInput,
        /// Blocks as variable lists, e.g. `1;2;3,4`.
        #[arg(long)]
        blocks: String,
        /// Base input as bits x_1..x_n, e.g. `0100`.
        #[arg(long)]
        x_star: String,
        /// Color-query budget for the period scan.
        #[arg(long)]
        cap: Option<u128>,
        /// Write the coloring file here.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Write the certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Function from a non-trivial coloring.
    ColorToFn {
        #[arg(long)]
        spec: PathBuf,
        /// Search radius for blue axis points.
        #[arg(long)]
        cap: Option<u64>,
        /// Random inputs for s(f) when the table is too large.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the truth-table file here (explicit tables only).
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ColoringArgs {
    /// Coloring file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Use the slice coloring (or slice group) with this n.
    #[arg(long)]
    n: Option<usize>,
    /// Color-query budget.
    #[arg(long)]
    cap: Option<u128>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ColoringArgs {
    fn options(&self) -> VerifyOptions {
        VerifyOptions { probe_cap: self.cap.unwrap_or(DEFAULT_PROBE_CAP), seed: self.seed, ..Default::default() }
    }

    fn load(&self, default: impl Fn(usize) -> Result<Coloring>) -> Result<Coloring> {
        match (&self.spec, self.n) {
            (Some(path), _) => Coloring::from_json(&read(path)?),
            (None, Some(n)) => default(n),
            (None, None) => Err(Error::InvalidArgument("give a coloring with --spec or --n".into())),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// bs_l(f) <= c_l s(f)^l: one function, or every function on --n <= 4 variables.
    Kk {
        #[command(flatten)]
        input: FunctionInput,
    },
    /// The slice coloring: non-trivial, min-width 3, r = n, d = 2r^2 - r.
    Theorem3 {
        #[arg(long)]
        n: usize,
        /// Random representative points scanned as an extra tripwire.
        #[arg(long, default_value_t = 0)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Coloring to function: bs(f) >= d and s(f) <= k s(C).
    Theorem5 {
        #[command(flatten)]
        coloring: ColoringArgs,
    },
    /// s(C) >= d^(1/k)/e^2.
    Theorem6 {
        #[command(flatten)]
        coloring: ColoringArgs,
    },
    /// d <= s^R (2 s^B - 1) for repeated colorings; --spec is the inner coloring.
    Theorem7 {
        #[command(flatten)]
        coloring: ColoringArgs,
        /// Number of copies (default n).
        #[arg(long)]
        copies: Option<usize>,
    },
    /// d <= s^R (2 s^B - 1) for sliced colorings.
    Theorem9 {
        #[command(flatten)]
        coloring: ColoringArgs,
    },
    /// Re-verify a stored reduction certificate.
    Certificate {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum SearchCommand {
    /// Every function on n <= 4 variables.
    Exhaustive {
        #[arg(long)]
        n: u32,
        /// Write one JSON record per line here.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Random functions on n <= 12 variables.
    Random {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        records: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Exact c_l for l = 1..=L.
    Const {
        #[arg(long, default_value_t = 10)]
        l: u32,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Fn(c) => run_fn(c),
        Command::Color(c) => run_color(c),
        Command::Reduce(c) => run_reduce(c),
        Command::Verify(c) => run_verify(c),
        Command::Search(c) => run_search(c),
        Command::Bounds(c) => run_bounds(c),
    }
}

fn run_fn(c: &FnCommand) -> Result<Outcome> {
    match c {
        FnCommand::Measure { input, l, cap } => {
            let f = input.load()?;
            let opts = BlockOptions { max_block_size: *cap, candidate_cap: DEFAULT_CANDIDATE_CAP };
            let m = measure(&f, opts)?;
            let mut results = json!({
                "n": m.n, "s": m.s, "s0": m.s0, "s1": m.s1, "bs": m.bs,
                "bs_l": m.bs_l, "block_size_cap": m.block_size_cap,
            });
            let mut witnesses = json!({
                "sensitivity": format_input_bits(m.sensitivity_witness.witness, f.n()),
                "bs": m.bs_witness,
                "bs_l": m.bs_l_witnesses,
            });
            if let Some(l) = *l {
                let w = l_block_sensitivity(&f, l)?;
                results["bs_l"][l.to_string()] = json!(w.value);
                witnesses["bs_l"][l.to_string()] = to_value(&w);
            }
            Ok(Outcome {
                fingerprint: Some(f.fingerprint()),
                checks: vec![Check::flag("witnesses replay", m.replays(&f))],
                results,
                witnesses,
                ..Default::default()
            })
        }
        FnCommand::Build { name, n, target } => {
            let need_n = || n.ok_or_else(|| Error::InvalidArgument("this function needs --n".into()));
            let f = match name {
                FunctionName::SortedExample => sorted_function(),
                FunctionName::RubinsteinG => rubinstein_g(need_n()?)?,
                FunctionName::Rubinstein => rubinstein_f(need_n()?)?.require_table()?.clone(),
            };
            if let Some(path) = target {
                write(path, &f.to_string())?;
            }
            Ok(Outcome {
                fingerprint: Some(f.fingerprint()),
                results: json!({ "n": f.n(), "table": f.to_hex() }),
                ..Default::default()
            })
        }
    }
}

fn named_coloring(name: ColoringName, n: usize) -> Result<Coloring> {
    Ok(match name {
        ColoringName::Slices => slice_coloring(n)?.into(),
        ColoringName::SliceGroup => slice_group(n)?.into(),
        ColoringName::RepeatedSliceGroup => repeated_coloring(slice_group(n)?.into(), n, DEFAULT_PROBE_CAP, None)?.0,
        ColoringName::DoubledSlices => double_coloring(slice_coloring(n)?.into()),
    })
}

fn report_checks(r: &ColoringReport) -> Vec<Check> {
    let exact = r.mode.is_exact();
    let mark = |c: Check| if exact { c } else { c.inexact() };
    vec![
        mark(Check::new("r(C) <= s(C)", r.r.value, Relation::Le, r.s.value)),
        mark(Check::new("s(C) <= 2 r(C)", r.s.value, Relation::Le, 2 * r.r.value)),
    ]
}

fn run_color(c: &ColorCommand) -> Result<Outcome> {
    match c {
        ColorCommand::Build { name, n, target } => {
            let coloring = named_coloring(*name, *n)?;
            if let Some(path) = target {
                write(path, &(coloring.to_json() + "\n"))?;
            }
            Ok(Outcome {
                fingerprint: Some(coloring.fingerprint()),
                results: json!({ "d": coloring.dim(), "kind": coloring.kind(), "coloring": coloring }),
                ..Default::default()
            })
        }
        ColorCommand::Measure { spec, cap, box_range, samples, seed } => {
            let coloring = Coloring::from_json(&read(spec)?)?;
            let cap = cap.unwrap_or(DEFAULT_PROBE_CAP);
            let bounds = box_range.as_deref().map(parse_box).transpose()?;
            let mut report = match (samples, bounds) {
                (Some(s), Some((lo, hi))) => sampled_report(&coloring, &SampleRegion::Box { lo, hi }, *s, *seed, &[])?,
                (Some(s), None) => sampled_report(&coloring, &SampleRegion::Representative, *s, *seed, &[])?,
                (None, Some((lo, hi))) => box_report(&coloring, lo, hi, cap)?,
                (None, None) => exact_report(&coloring, cap)?,
            };
            let nontrivial = check_nontrivial(&coloring, DEFAULT_WIDTH_CAP);
            let mut checks = report_checks(&report);
            checks.push(Check::flag("witnesses replay", report.replays(&coloring)));
            let mut results = to_value(&report);
            results["nontrivial"] = json!(nontrivial.is_ok());
            if let Err(e) = &nontrivial {
                results["nontrivial_reason"] = json!(e.to_string());
            }
            results["seed"] = json!(seed);
            report.min_width = nontrivial.ok();
            results["k"] = json!(report.k());
            results["min_width"] = to_value(&report.min_width);
            Ok(Outcome { fingerprint: Some(coloring.fingerprint()), results, checks, ..Default::default() })
        }
    }
}

fn parse_blocks(text: &str) -> Result<Vec<Block>> {
    text.split(';')
        .map(|part| {
            let vars = part
                .trim()
                .trim_matches(|c| c == '{' || c == '}')
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<u32>()
                        .ok()
                        .filter(|&v| (1..=64).contains(&v))
                        .ok_or_else(|| Error::Parse(format!("bad variable {v:?} in block {part:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Block::from_vars(&vars))
        })
        .collect()
}

fn certificate_outcome(cert: &ReductionCertificate, path: Option<&PathBuf>, theorem: &str) -> Result<Outcome> {
    if let Some(path) = path {
        write(path, &(cert.to_json() + "\n"))?;
    }
    Ok(Outcome {
        theorem: Some(theorem.into()),
        fingerprint: Some(cert.source_fingerprint().into()),
        checks: cert.checks().to_vec(),
        results: json!({
            "source_fingerprint": cert.source_fingerprint(),
            "target_fingerprint": cert.target_fingerprint(),
        }),
        witnesses: to_value(cert),
    })
}

fn run_reduce(c: &ReduceCommand) -> Result<Outcome> {
    match c {
        ReduceCommand::FnToColor { input, blocks, x_star, cap, target, cert } => {
            let f = input.load()?;
            let blocks = parse_blocks(blocks)?;
            let x = parse_input_bits(x_star)?;
            let (coloring, certificate) =
                function_to_coloring(&f, &blocks, x, cap.unwrap_or(DEFAULT_PROBE_CAP))?;
            let coloring: Coloring = coloring.into();
            if let Some(path) = target {
                write(path, &(coloring.to_json() + "\n"))?;
            }
            let mut out = certificate_outcome(&certificate, cert.as_ref(), "theorem4")?;
            out.results["d"] = json!(blocks.len());
            Ok(out)
        }
        ReduceCommand::ColorToFn { spec, cap, samples, seed, target, cert } => {
            let coloring = Coloring::from_json(&read(spec)?)?;
            let defaults = ReductionOptions::default();
            let opts = ReductionOptions {
                width_cap: cap.unwrap_or(defaults.width_cap),
                samples: samples.unwrap_or(defaults.samples),
                seed: *seed,
                ..defaults
            };
            let made = coloring_to_function(&coloring, opts)?;
            match (target, &made.table) {
                (Some(path), Some(t)) => write(path, &t.to_string())?,
                (Some(_), None) => {
                    return Err(Error::resource("explicit table variables", made.oracle.block_sizes().iter().sum::<u64>() as u128, 24))
                }
                _ => {}
            }
            let mut out = certificate_outcome(&made.certificate, cert.as_ref(), "theorem5")?;
            out.results["variables"] = json!(made.oracle.block_sizes().iter().sum::<u64>());
            out.results["explicit_table"] = json!(made.table.is_some());
            out.results["seed"] = json!(seed);
            Ok(out)
        }
    }
}

fn theorem_outcome(r: TheoremReport, fingerprint: Option<String>) -> Outcome {
    Outcome {
        theorem: Some(r.theorem),
        fingerprint,
        checks: r.checks,
        results: {
            let mut v = r.results;
            v["statement"] = json!(r.statement);
            v
        },
        witnesses: r.witnesses,
    }
}

fn run_verify(c: &VerifyCommand) -> Result<Outcome> {
    match c {
        VerifyCommand::Kk { input } => {
            if input.given() {
                let f = input.load()?;
                Ok(theorem_outcome(verify::kk_function(&f)?, Some(f.fingerprint())))
            } else {
                let n = input.n.ok_or_else(|| Error::InvalidArgument("give --n, or a function".into()))?;
                Ok(theorem_outcome(verify::kk_exhaustive(n)?, None))
            }
        }
        VerifyCommand::Theorem3 { n, samples, seed, cap } => {
            let opts = VerifyOptions {
                probe_cap: cap.unwrap_or(DEFAULT_PROBE_CAP),
                samples: *samples,
                seed: *seed,
                ..Default::default()
            };
            let mut out = theorem_outcome(verify::theorem3(*n, opts)?, None);
            out.results["seed"] = json!(seed);
            Ok(out)
        }
        VerifyCommand::Theorem5 { coloring } => {
            let c = coloring.load(|n| Ok(slice_coloring(n)?.into()))?;
            Ok(theorem_outcome(verify::theorem5(&c, coloring.options())?, Some(c.fingerprint())))
        }
        VerifyCommand::Theorem6 { coloring } => {
            let c = coloring.load(|n| Ok(slice_coloring(n)?.into()))?;
            Ok(theorem_outcome(verify::theorem6(&c, coloring.options())?, Some(c.fingerprint())))
        }
        VerifyCommand::Theorem7 { coloring, copies } => {
            let inner = coloring.load(|n| Ok(slice_group(n)?.into()))?;
            let copies = copies
                .or(coloring.n)
                .ok_or_else(|| Error::InvalidArgument("give --copies with --spec".into()))?;
            let fp = inner.fingerprint();
            Ok(theorem_outcome(verify::theorem7(inner, copies, coloring.options())?, Some(fp)))
        }
        VerifyCommand::Theorem9 { coloring } => {
            let c = coloring.load(|n| Ok(slice_coloring(n)?.into()))?;
            let sliced = c
                .as_sliced()
                .ok_or_else(|| Error::NotConforming(format!("{} coloring is not sliced", c.kind())))?;
            Ok(theorem_outcome(verify::theorem9(sliced, coloring.options())?, Some(c.fingerprint())))
        }
        VerifyCommand::Certificate { file } => {
            let text = read(file)?;
            let cert = ReductionCertificate::from_json(&text)?;
            Ok(theorem_outcome(verify::certificate(&cert)?, Some(sensitivity_core::fingerprint(text.as_bytes()))))
        }
    }
}

fn write_records(path: Option<&PathBuf>, records: &[&SeparationRecord]) -> Result<()> {
    if let Some(path) = path {
        let lines: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
        write(path, &lines)?;
    }
    Ok(())
}

fn run_search(c: &SearchCommand) -> Result<Outcome> {
    match c {
        SearchCommand::Exhaustive { n, records } => {
            let scan = exhaustive_scan(*n)?;
            write_records(records.as_ref(), &scan.maxima.iter().collect::<Vec<_>>())?;
            let checks = vec![
                Check::new("kk counterexamples", scan.kk_counterexamples.len(), Relation::Eq, 0usize),
                Check::new("bs_1 != s", scan.bs1_mismatches.len(), Relation::Eq, 0usize),
                Check::new("bs_s != bs", scan.bss_mismatches.len(), Relation::Eq, 0usize),
                Check::new("growth bound violations", scan.growth_violations.len(), Relation::Eq, 0usize),
                Check::flag("records replay", scan.maxima.iter().all(SeparationRecord::replays)),
            ];
            Ok(Outcome {
                checks,
                results: json!({
                    "n": n,
                    "functions": scan.functions,
                    "max_bs_by_s": scan.maxima.iter().map(|r| json!({"s": r.s, "bs": r.bs})).collect::<Vec<_>>(),
                }),
                witnesses: to_value(&scan),
                ..Default::default()
            })
        }
        SearchCommand::Random { n, samples, seed, records } => {
            let scan = random_scan(*n, *samples, *seed)?;
            write_records(records.as_ref(), &scan.records())?;
            let checks = vec![
                Check::new("growth bound violations", scan.growth_violations.len(), Relation::Eq, 0usize),
                Check::flag("records replay", scan.records().iter().all(|r| r.replays())),
            ];
            Ok(Outcome {
                checks,
                results: json!({
                    "n": n,
                    "samples": samples,
                    "seed": seed,
                    "best": scan.best.as_ref().map(|r| json!({"s": r.s, "bs": r.bs, "ratio": r.ratio})),
                }),
                witnesses: to_value(&scan),
                ..Default::default()
            })
        }
    }
}

fn run_bounds(c: &BoundsCommand) -> Result<Outcome> {
    match c {
        BoundsCommand::Const { l } => {
            if *l == 0 {
                return Err(Error::InvalidArgument("--l must be at least 1".into()));
            }
            let constants = (1..=*l).map(kk_constant).collect::<Result<Vec<_>>>()?;
            let checks = kk_constant_check(*l)?.checks;
            Ok(Outcome {
                theorem: Some("theorem1".into()),
                checks,
                results: json!({ "constants": constants }),
                ..Default::default()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_lists() {
        let b = parse_blocks("1;2;3,4").unwrap();
        assert_eq!(b, vec![Block(1), Block(2), Block(0b1100)]);
        assert_eq!(parse_blocks("{1},{2}").unwrap_err().to_string().is_empty(), false);
        assert!(parse_blocks("0").is_err());
        assert_eq!(parse_blocks("{3,4}").unwrap(), vec![Block(0b1100)]);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
