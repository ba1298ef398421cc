//! Bound constants and instance checks of the sensitivity inequalities.

mod graph;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::boolfn::{measure, BlockOptions, MeasureReport, TruthTable};
use crate::lattice::{ColoringReport, RepeatedColoring, SlicedColoring, ColorOracle};
use crate::report::{Check, CheckReport, Quantity, Relation};
use crate::{Error, Result};

pub use graph::{
    max_clique, max_independent_set, max_mutual_intersection, slice_graph, MutualIntersection, SliceGraph,
    MAX_GRAPH_VERTICES,
};

/// Slack on floating `>=` comparisons against `alpha d^(1/k)`.
pub const FLOAT_SLACK: f64 = 1e-12;

/// `c_l` in `bs_l(f) <= c_l s(f)^l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KKConstant {
    pub l: u32,
    pub value: BigRational,
}

impl KKConstant {
    pub fn approx(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for KKConstant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            l: u32,
            value: Quantity,
            approx: f64,
        }
        Repr { l: self.l, value: Quantity::rational(&self.value), approx: self.approx() }.serialize(s)
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `c_l = (1 + 1/(l-1))^(l-1) / (l-1)!`, and `c_1 = 1` since `bs_1 = s`.
pub fn kk_constant(l: u32) -> Result<KKConstant> {
    if l == 0 {
        return Err(Error::InvalidArgument("l must be at least 1".into()));
    }
    if l == 1 {
        return Ok(KKConstant { l, value: BigRational::one() });
    }
    let m = l - 1;
    let base = BigRational::new(BigInt::from(m + 1), BigInt::from(m));
    let power = (0..m).fold(BigRational::one(), |acc, _| acc * &base);
    Ok(KKConstant { l, value: power / BigRational::from_integer(factorial(m)) })
}

/// `sum_{k=0}^{terms} 1/k!`, a rational strictly below `e`.
pub fn e_lower_bound(terms: u32) -> BigRational {
    (0..=terms).fold(BigRational::zero(), |acc, k| acc + BigRational::new(BigInt::one(), factorial(k)))
}

/// `c_l < e/(l-1)!` for `l` in `2..=max_l`, exactly: `c_l (l-1)!` is
/// compared against a rational lower bound on `e`, which makes each
/// passing check a proof of the strict inequality.
pub fn kk_constant_check(max_l: u32) -> Result<CheckReport> {
    let e_low = e_lower_bound(40);
    let mut report = CheckReport::new("c_l < e/(l-1)!");
    for l in 2..=max_l {
        let c = kk_constant(l)?;
        let scaled = c.value * BigRational::from_integer(factorial(l - 1));
        report.push(Check::new(
            format!("c_{l} (l-1)! < e"),
            Quantity::rational(&scaled),
            Relation::Lt,
            Quantity::rational(&e_low),
        ));
    }
    Ok(report)
}

/// `bs_l(f) <= c_l s(f)^l` for every computed `l`, and
/// `bs(f) < e^(s+1) sqrt(s / 2 pi)` when `s >= 1`.
pub fn kk_check(f: &TruthTable) -> Result<CheckReport> {
    Ok(kk_check_measured(&measure(f, BlockOptions::default())?))
}

pub fn kk_check_measured(m: &MeasureReport) -> CheckReport {
    let mut report = CheckReport::new("bs_l(f) <= c_l s(f)^l");
    let s = BigRational::from_integer(BigInt::from(m.s));
    for (&l, &bs_l) in &m.bs_l {
        let c = kk_constant(l).expect("l >= 1");
        let bound = (0..l).fold(c.value, |acc, _| acc * &s);
        report.push(Check::new(format!("bs_{l} <= c_{l} s^{l}"), bs_l, Relation::Le, Quantity::rational(&bound)));
    }
    if m.s >= 1 {
        let s = m.s as f64;
        let bound = (s + 1.0).exp() * (s / (2.0 * std::f64::consts::PI)).sqrt();
        report.push(Check::new("bs < e^(s+1) sqrt(s/2pi)", m.bs as f64, Relation::Lt, bound));
    }
    report
}

/// `s(C) >= alpha d^(1/k)` with `alpha = 1/e^2`; for `k = 1` also
/// `s(C) >= d`, since the red origin then has a blue neighbor on every
/// axis.
pub fn lattice_lower_bound_check(report: &ColoringReport, d: usize, k: u64) -> CheckReport {
    let exact = report.mode.is_exact();
    let mut out = CheckReport::new("s(C) >= d^(1/k)/e^2");
    let alpha = (-2.0f64).exp();
    let bound = alpha * (d as f64).powf(1.0 / k.max(1) as f64);
    let check = Check::with_slack(
        format!("s(C) >= e^-2 * {d}^(1/{k})"),
        report.s.value as f64,
        Relation::Ge,
        bound,
        FLOAT_SLACK,
    );
    out.push(if exact { check } else { check.inexact() });
    if k == 1 {
        let c = Check::new("s(C) >= d when k = 1", report.s.value, Relation::Ge, d);
        out.push(if exact { c } else { c.inexact() });
    }
    out
}

fn mark(check: Check, exact: bool) -> Check {
    if exact {
        check
    } else {
        check.inexact()
    }
}

/// The chain `|B_i| <= s^B - 1`, `alpha(G') <= s^R`, Turan,
/// `d <= s^R (2 s^B - 1)` and `d <= 2 r^2 - r` for a sliced coloring.
///
/// With a non-exact `report` the measured values are lower bounds; a
/// passing chain is still valid, a failing one is inconclusive.
pub fn sliced_bound_check(c: &SlicedColoring, report: &ColoringReport) -> Result<CheckReport> {
    let g = slice_graph(c)?;
    let exact = report.mode.is_exact();
    let d = c.d;
    let (sr, sb, r) = (report.sr.value as i64, report.sb.value as i64, report.r.value as i64);
    let mut out = CheckReport::new("d <= s^R (2 s^B - 1)");
    out.push(Check::flag("slice graph has no loops", !g.has_loops()));

    let slices = c.by_axis()?;
    let widest = slices.iter().map(|s| s.zeros.len()).max().unwrap_or(0);
    out.push(mark(Check::new("max |B_i| <= s^B - 1", widest, Relation::Le, sb - 1), exact));
    let max_out = (0..d).map(|i| g.out_degree(i)).max().unwrap_or(0);
    out.push(mark(Check::new("max out-degree <= s^B - 1", max_out, Relation::Le, sb - 1), exact));

    let intersection = max_mutual_intersection(c)?;
    let in_all = slices_contain(c, &intersection);
    out.push(Check::flag("common point lies in every chosen slice", in_all));
    let red_ok = !c.color(&intersection.red_witness).is_blue()
        && crate::lattice::axis_sensitivity(c, &intersection.red_witness) >= intersection.size;
    out.push(Check::flag("shifted common point is red with that many sensitive axes", red_ok));
    out.push(mark(
        Check::new("max mutual intersection <= s^R", intersection.size, Relation::Le, sr),
        exact,
    ));

    let undirected = g.undirected();
    let independent = max_independent_set(&undirected)?;
    out.push(Check::new(
        "alpha(G') = max mutual intersection",
        independent.len(),
        Relation::Eq,
        intersection.size,
    ));
    out.push(mark(Check::new("alpha(G') <= s^R", independent.len(), Relation::Le, sr), exact));
    let edges = g.undirected_edge_count();
    let turan = BigRational::new(BigInt::from(d * d), BigInt::from((2 * edges + d).max(1)));
    out.push(Check::new("alpha(G') >= d^2/(2|E| + d)", independent.len(), Relation::Ge, Quantity::rational(&turan)));
    let avg = BigRational::new(BigInt::from(2 * edges), BigInt::from(d.max(1)));
    out.push(mark(
        Check::new("average degree <= 2 s^B - 2", Quantity::rational(&avg), Relation::Le, 2 * sb - 2),
        exact,
    ));
    out.push(mark(Check::new("d <= s^R (2 s^B - 1)", d, Relation::Le, sr * (2 * sb - 1)), exact));
    out.push(mark(Check::new("d <= 2 r^2 - r", d, Relation::Le, 2 * r * r - r), exact));
    Ok(out)
}

fn slices_contain(c: &SlicedColoring, m: &MutualIntersection) -> bool {
    let slices = match c.by_axis() {
        Ok(s) => s,
        Err(_) => return false,
    };
    m.slices.iter().all(|&i| slices[i].contains(&m.point))
}

/// Instance checks for a repeated coloring of `n` copies of a
/// `k`-dimensional inner coloring: `s^R(C) = n`, `s^B(C) = s^B(C')`,
/// `k <= 2 s^B(C') - 1`, and `d <= s^R (2 s^B - 1) <= 2 r^2 - r`.
pub fn repeated_bound_check(c: &RepeatedColoring, outer: &ColoringReport, inner: &ColoringReport) -> CheckReport {
    let exact = outer.mode.is_exact() && inner.mode.is_exact();
    let n = c.copies as i64;
    let k = c.inner.dim() as i64;
    let d = n * k;
    let (sr, sb, r) = (outer.sr.value as i64, outer.sb.value as i64, outer.r.value as i64);
    let inner_sb = inner.sb.value as i64;
    let mut out = CheckReport::new("d <= s^R (2 s^B - 1) for a repeated coloring");
    out.push(mark(Check::new("s^R(C') = 1", inner.sr.value, Relation::Eq, 1usize), exact));
    out.push(mark(Check::new("s^R(C) = copies", sr, Relation::Eq, n), exact));
    out.push(mark(Check::new("s^B(C) = s^B(C')", sb, Relation::Eq, inner_sb), exact));
    out.push(mark(Check::new("k <= 2 s^B(C') - 1", k, Relation::Le, 2 * inner_sb - 1), exact));
    out.push(mark(Check::new("d <= s^R (2 s^B - 1)", d, Relation::Le, sr * (2 * sb - 1)), exact));
    out.push(mark(Check::new("d <= 2 r^2 - r", d, Relation::Le, 2 * r * r - r), exact));
    out
}
