//! Theorem-level verification runs, each bundling the measurements and
//! checks for one named statement.

use serde::Serialize;
use serde_json::{json, Value};

use crate::boolfn::{measure, BlockOptions, TruthTable};
use crate::bounds::{
    kk_check_measured, kk_constant, kk_constant_check, lattice_lower_bound_check, max_mutual_intersection,
    repeated_bound_check, sliced_bound_check,
};
use crate::constructions::{slice_coloring, GroupedCoordinates};
use crate::lattice::{
    axis_sensitivity, check_nontrivial, exact_report, exact_report_sliced, repeated_coloring, sampled_report,
    ColorOracle, Coloring, ColoringReport, SampleRegion, SlicedColoring,
};
use crate::reductions::{block_symmetry_check, coloring_to_function, ReductionCertificate, ReductionOptions};
use crate::report::{Check, Quantity, Relation};
use crate::search::exhaustive_scan;
use crate::{Error, Result};

/// Result of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    /// Identifier such as `theorem3`.
    pub theorem: String,
    pub statement: String,
    pub checks: Vec<Check>,
    pub results: Value,
    pub witnesses: Value,
}

impl TheoremReport {
    fn new(theorem: &str, statement: &str) -> Self {
        TheoremReport {
            theorem: theorem.into(),
            statement: statement.into(),
            checks: Vec::new(),
            results: json!({}),
            witnesses: json!({}),
        }
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }
}

/// Knobs shared by the lattice verifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub probe_cap: u128,
    pub width_cap: u64,
    /// Extra random representative points scanned as a tripwire; 0 skips.
    pub samples: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        let r = ReductionOptions::default();
        VerifyOptions { probe_cap: r.probe_cap, width_cap: r.width_cap, samples: 0, seed: 0 }
    }
}

const KK: &str = "bs_l(f) <= c_l s(f)^l with c_l = (1 + 1/(l-1))^(l-1)/(l-1)!";

/// `bs_l <= c_l s^l` on one function.
pub fn kk_function(f: &TruthTable) -> Result<TheoremReport> {
    let m = measure(f, BlockOptions::default())?;
    let mut out = TheoremReport::new("theorem1", KK);
    out.checks = kk_check_measured(&m).checks;
    out.results = json!({ "n": m.n, "s": m.s, "bs": m.bs, "bs_l": m.bs_l });
    out.witnesses = json!({
        "sensitivity": m.sensitivity_witness,
        "bs": m.bs_witness,
        "bs_l": m.bs_l_witnesses,
    });
    Ok(out)
}

/// `bs_l <= c_l s^l` on every function of `n <= 4` variables, with the
/// exact constants.
pub fn kk_exhaustive(n: u32) -> Result<TheoremReport> {
    let scan = exhaustive_scan(n)?;
    let mut out = TheoremReport::new("theorem1", KK);
    let c2 = kk_constant(2)?;
    let c3 = kk_constant(3)?;
    out.checks.push(Check::new("c_2", Quantity::rational(&c2.value), Relation::Eq, 2i64));
    out.checks.push(Check::new(
        "c_3",
        Quantity::rational(&c3.value),
        Relation::Eq,
        Quantity::Rational { num: "9".into(), den: "8".into() },
    ));
    out.checks.extend(kk_constant_check(50)?.checks);
    let count = |name: &str, v: &[u64]| Check::new(name, v.len(), Relation::Eq, 0usize);
    out.checks.push(count("functions with bs_l > c_l s^l", &scan.kk_counterexamples));
    out.checks.push(count("functions with bs_1 != s", &scan.bs1_mismatches));
    out.checks.push(count("functions with bs_s != bs", &scan.bss_mismatches));
    out.checks.push(count("functions with bs >= e^(s+1) sqrt(s/2pi)", &scan.growth_violations));
    out.results = json!({
        "n": n,
        "functions": scan.functions,
        "max_bs_by_s": scan.maxima.iter().map(|r| json!({"s": r.s, "bs": r.bs})).collect::<Vec<_>>(),
    });
    out.witnesses = json!({
        "maxima": scan.maxima,
        "counterexamples": scan.kk_counterexamples,
    });
    Ok(out)
}

fn coloring_results(report: &ColoringReport) -> Value {
    json!({
        "d": report.d,
        "mode": report.mode,
        "points_scanned": report.points_scanned,
        "s": report.s.value,
        "r": report.r.value,
        "s_red": report.s_red.value,
        "s_blue": report.s_blue.value,
        "sR": report.sr.value,
        "sB": report.sb.value,
    })
}

fn coloring_witnesses(report: &ColoringReport) -> Value {
    json!({
        "s": report.s.witness,
        "r": report.r.witness,
        "sR": report.sr.witness,
        "sB": report.sb.witness,
    })
}

/// The slice coloring with `n` groups: non-trivial, min-width 3, `r = n`
/// and `d = 2 r^2 - r`.
pub fn theorem3(n: usize, opts: VerifyOptions) -> Result<TheoremReport> {
    let c = slice_coloring(n)?;
    let d = c.d;
    let mut out = TheoremReport::new("theorem3", "a non-trivial coloring with d = 2 r(C)^2 - r(C)");
    let width = check_nontrivial(&c, opts.width_cap)?;
    out.checks.push(Check::flag("non-trivial", true));
    out.checks.push(Check::new("min-width k", width.k, Relation::Eq, 3u64));
    out.checks.push(Check::flag("conforming sliced coloring", c.check_conforming().is_ok()));

    let mutual = max_mutual_intersection(&c)?;
    let witness_r = axis_sensitivity(&c, &mutual.red_witness);
    out.checks.push(Check::flag("shifted common point is red", !c.color(&mutual.red_witness).is_blue()));
    out.checks.push(Check::new("r at the shifted common point", witness_r, Relation::Ge, n));

    let report = exact_report_sliced(&c, opts.probe_cap)?;
    out.checks.push(Check::new("r(C)", report.r.value, Relation::Eq, n));
    out.checks.push(Check::new("d = 2 r^2 - r", d, Relation::Eq, 2 * report.r.value * report.r.value - report.r.value));
    out.checks.push(Check::new("s(C) <= 2 r(C)", report.s.value, Relation::Le, 2 * report.r.value));
    out.checks.push(Check::new("r(C) <= s(C)", report.r.value, Relation::Le, report.s.value));

    let mut sampled_max = Value::Null;
    if opts.samples > 0 {
        let sampled = sampled_report(&c, &SampleRegion::Representative, opts.samples, opts.seed, &[])?;
        out.checks.push(Check::new("sampled r never exceeds n", sampled.r.value, Relation::Le, n));
        sampled_max = json!({ "samples": opts.samples, "seed": opts.seed, "r": sampled.r.value, "witness": sampled.r.witness });
    }
    let coords = GroupedCoordinates { n };
    out.results = coloring_results(&report);
    out.results["n"] = json!(n);
    out.results["k"] = json!(width.k);
    out.results["max_mutual_intersection"] = json!(mutual.size);
    out.results["slices"] = json!(c.slices.iter().map(|s| s.row(d)).collect::<Vec<_>>());
    out.results["coordinate_layout"] =
        json!(format!("{{i,j}} -> (i-1)*{} + (j-1), groups row-major", coords.width()));
    out.results["sampled"] = sampled_max;
    out.witnesses = coloring_witnesses(&report);
    out.witnesses["lemma_point"] = json!(mutual.point);
    out.witnesses["red_witness"] = json!(mutual.red_witness);
    Ok(out)
}

/// The coloring-to-function reduction on `c`, with its certificate
/// re-verified and within-block symmetry checked.
pub fn theorem5(c: &Coloring, opts: VerifyOptions) -> Result<TheoremReport> {
    let ropts = ReductionOptions { width_cap: opts.width_cap, probe_cap: opts.probe_cap, seed: opts.seed, ..Default::default() };
    let out_fn = coloring_to_function(c, ropts)?;
    let ReductionCertificate::ColoringToFunction(cert) = &out_fn.certificate else {
        unreachable!("coloring_to_function returns its own direction")
    };
    let mut out = TheoremReport::new("theorem5", "a function with bs(f) >= d and s(f) <= k s(C)");
    out.checks.extend(cert.checks.iter().cloned());
    out.checks.extend(out_fn.certificate.verify()?);
    let symmetric = match &out_fn.table {
        Some(t) => block_symmetry_check(t, &cert.block_sizes, 0, opts.seed),
        None => block_symmetry_check(&out_fn.oracle, &cert.block_sizes, 10_000, opts.seed),
    };
    out.checks.push(Check::flag("bits within a block are interchangeable", symmetric));
    out.results = json!({
        "d": c.dim(),
        "k": cert.k,
        "variables": cert.block_sizes.iter().sum::<u64>(),
        "block_sizes": cert.block_sizes,
        "explicit_table": cert.explicit_table,
        "s_f": cert.s_function,
        "s_C": cert.s_coloring,
        "r_C": cert.r_coloring,
        "coloring_mode": cert.coloring_mode,
    });
    out.witnesses = serde_json::to_value(&out_fn.certificate)?;
    Ok(out)
}

fn exact_coloring(c: &Coloring, opts: VerifyOptions) -> Result<ColoringReport> {
    let mut report = exact_report(c, opts.probe_cap)?;
    report.min_width = Some(check_nontrivial(c, opts.width_cap)?);
    Ok(report)
}

/// `s(C) >= d^(1/k)/e^2` for a coloring with an exact method.
pub fn theorem6(c: &Coloring, opts: VerifyOptions) -> Result<TheoremReport> {
    let report = exact_coloring(c, opts)?;
    let k = report.k().expect("min-width set");
    let mut out = TheoremReport::new("theorem6", "s(C) >= alpha d^(1/k) with alpha = 1/e^2");
    out.checks = lattice_lower_bound_check(&report, c.dim(), k).checks;
    out.results = coloring_results(&report);
    out.results["k"] = json!(k);
    out.witnesses = coloring_witnesses(&report);
    Ok(out)
}

/// `d <= s^R (2 s^B - 1)` for `copies` copies of `inner`.
pub fn theorem7(inner: Coloring, copies: usize, opts: VerifyOptions) -> Result<TheoremReport> {
    let (c, inner_report) = repeated_coloring(inner, copies, opts.probe_cap, None)?;
    let Coloring::Repeated(rep) = &c else { unreachable!("repeated_coloring builds a repeated coloring") };
    let outer = exact_report(&c, opts.probe_cap)?;
    let mut out = TheoremReport::new("theorem7", "d <= s^R(C) (2 s^B(C) - 1) for repeated colorings");
    out.checks.push(Check::flag("inner coloring is non-trivial", check_nontrivial(&*rep.inner, opts.width_cap).is_ok()));
    out.checks.extend(repeated_bound_check(rep, &outer, &inner_report).checks);
    out.results = coloring_results(&outer);
    out.results["copies"] = json!(copies);
    out.results["inner"] = coloring_results(&inner_report);
    out.witnesses = coloring_witnesses(&outer);
    out.witnesses["inner"] = coloring_witnesses(&inner_report);
    Ok(out)
}

/// `d <= s^R (2 s^B - 1)` for a sliced coloring, through the slice graph.
pub fn theorem9(c: &SlicedColoring, opts: VerifyOptions) -> Result<TheoremReport> {
    c.check_conforming()?;
    check_nontrivial(c, opts.width_cap)?;
    let report = exact_report_sliced(c, opts.probe_cap)?;
    let mut out = TheoremReport::new("theorem9", "d <= s^R (2 s^B - 1) for sliced colorings");
    out.checks = sliced_bound_check(c, &report)?.checks;
    let mutual = max_mutual_intersection(c)?;
    out.checks.push(Check::new("max mutual intersection = s^R", mutual.size, Relation::Eq, report.sr.value));
    out.results = coloring_results(&report);
    out.results["max_mutual_intersection"] = json!(mutual.size);
    out.witnesses = coloring_witnesses(&report);
    out.witnesses["mutual_intersection"] = serde_json::to_value(&mutual)?;
    Ok(out)
}

/// Re-verifies a stored reduction certificate.
pub fn certificate(cert: &ReductionCertificate) -> Result<TheoremReport> {
    let (id, statement) = match cert {
        ReductionCertificate::FunctionToColoring(_) => ("theorem4", "a coloring with d = bs(f) and s(C) <= s(f)"),
        ReductionCertificate::ColoringToFunction(_) => ("theorem5", "a function with bs(f) >= d and s(f) <= k s(C)"),
    };
    let mut out = TheoremReport::new(id, statement);
    out.checks = cert.verify()?;
    out.results = json!({
        "source_fingerprint": cert.source_fingerprint(),
        "target_fingerprint": cert.target_fingerprint(),
    });
    Ok(out)
}

/// Parses `lo:hi`.
pub fn parse_box(text: &str) -> Result<(i64, i64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("box must look like lo:hi, got {text:?}")))?;
    let parse = |s: &str| s.trim().parse::<i64>().map_err(|e| Error::Parse(format!("box bound {s:?}: {e}")));
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty box {lo}:{hi}")));
    }
    Ok((lo, hi))
}
