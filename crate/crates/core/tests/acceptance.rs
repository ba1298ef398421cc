//! Acceptance suite: one line per criterion, then a non-zero exit if any
//! criterion failed. Runs without the libtest harness so the lines are
//! always printed.

mod common;

use std::time::{Duration, Instant};

use common::{
    kk_fraction, naive_bs, naive_bs_l, naive_probe, naive_sensitivity, naive_sensitivity_at, slice_blue, TABLE_ONE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sensitivity_core::boolfn::{
    format_input_bits, measure, parse_input_bits, sensitivity_bitmap, Block, BlockOptions, TruthTable,
};
use sensitivity_core::bounds::{
    kk_constant, lattice_lower_bound_check, max_independent_set, max_mutual_intersection, slice_graph,
    sliced_bound_check,
};
use sensitivity_core::constructions::{rubinstein_f, slice_coloring, slice_group, sorted_function};
use sensitivity_core::lattice::{
    axis_sensitivity, check_nontrivial, double_coloring, exact_report, representative_scan, sampled_report,
    ColorOracle, Coloring, ColoringReport, SampleRegion, ScanMode, Slice, SlicedColoring, DEFAULT_PROBE_CAP,
    DEFAULT_WIDTH_CAP,
};
use sensitivity_core::reductions::{coloring_to_function, function_to_coloring, ReductionOptions};
use sensitivity_core::search::exhaustive_scan;
use sensitivity_core::verify::kk_exhaustive;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sorted_blocks() -> (Vec<Block>, u64) {
    (
        vec![Block::from_vars(&[1]), Block::from_vars(&[2]), Block::from_vars(&[3, 4])],
        parse_input_bits("0100").unwrap(),
    )
}

fn s_of(f: &TruthTable) -> u32 {
    let (a, b) = naive_sensitivity(f);
    a.max(b)
}

/// The sorted-input function has `s = 2` and `bs = 3`.
fn criterion_1() -> Outcome {
    let f = sorted_function();
    let m = measure(&f, BlockOptions::default()).map_err(err)?;
    ensure!(m.s == 2 && m.bs == 3, "measured s = {}, bs = {}", m.s, m.bs);
    ensure!(m.replays(&f), "witnesses do not replay");
    ensure!(s_of(&f) == 2 && naive_bs(&f) == 3, "oracle disagrees");
    Ok(format!("s = {}, bs = {} at input {}", m.s, m.bs, format_input_bits(m.bs_witness.input, 4)))
}

/// Rubinstein's function for `n = 4`: `s = 4`, `bs = 8` on 16 variables.
fn criterion_2() -> Outcome {
    let f = rubinstein_f(4).map_err(err)?;
    let f = f.require_table().map_err(err)?;
    ensure!(f.n() == 16, "n = {}", f.n());
    let s = s_of(f);
    ensure!(s == 4, "oracle s = {s}");
    let m = measure(f, BlockOptions { max_block_size: Some(s), ..Default::default() }).map_err(err)?;
    ensure!(m.s == 4 && m.bs == 8, "measured s = {}, bs = {}", m.s, m.bs);
    ensure!(m.bs_witness.replays(f, Some(s)), "bs witness does not replay");
    Ok(format!("s = {}, bs = {} with block-size cap {}", m.s, m.bs, m.block_size_cap))
}

/// The slice coloring with `n = 2`: non-trivial, min-width 3, `r = 2` over
/// the representative box, `d = 6 = 2 r^2 - r`.
fn criterion_3() -> Outcome {
    let c = slice_coloring(2).map_err(err)?;
    let width = check_nontrivial(&c, DEFAULT_WIDTH_CAP).map_err(err)?;
    ensure!(width.k == 3, "min-width {}", width.k);
    let report = representative_scan(&c, ScanMode::ExactRepresentative, DEFAULT_PROBE_CAP).map_err(err)?;
    ensure!(report.points_scanned <= 7u64.pow(6), "{} points scanned", report.points_scanned);
    let r = report.r.value;
    ensure!(r == 2, "r = {r}");
    ensure!(c.d == 6 && c.d == 2 * r * r - r, "d = {}", c.d);
    ensure!(report.replays(&c), "witnesses do not replay");
    // Direct probing of a box holding every relevant value gives the same r.
    let mut best = 0;
    let side = 7i64;
    for idx in 0..side.pow(6) {
        let p: Vec<i64> = (0..6).map(|i| (idx / side.pow(i)) % side - 1).collect();
        best = best.max(naive_probe(|x| slice_blue(2, x), &p).2);
    }
    ensure!(best == 2, "box probe r = {best}");
    Ok(format!("k = 3, r = {r}, d = {} = 2r^2 - r, {} representative points", c.d, report.points_scanned))
}

/// The slice coloring with `n = 3`: the shifted common point has `r >= 3`,
/// the slices are the fifteen table rows, and a million representative
/// points never exceed `r = 3`.
fn criterion_4() -> Outcome {
    let c = slice_coloring(3).map_err(err)?;
    let rows: Vec<String> = c.slices.iter().map(|s| s.row(c.d)).collect();
    let expected: Vec<String> = TABLE_ONE.iter().map(|r| r.concat()).collect();
    ensure!(rows == expected, "slice rows differ: {rows:?}");
    let mutual = max_mutual_intersection(&c).map_err(err)?;
    let w = &mutual.red_witness;
    let (blue, _, r_w) = naive_probe(|x| slice_blue(3, x), w);
    ensure!(!blue && r_w >= 3, "witness {w:?}: blue = {blue}, r = {r_w}");
    ensure!(axis_sensitivity(&c, w) == r_w, "library and oracle disagree at the witness");
    let sampled = sampled_report(&c, &SampleRegion::Representative, 1_000_000, 2024, &[]).map_err(err)?;
    ensure!(sampled.r.value <= 3, "sampled r = {}", sampled.r.value);
    Ok(format!("witness r = {r_w}, 15 rows match, sampled max r = {} over 10^6 points", sampled.r.value))
}

/// The function-to-coloring instance on the sorted function.
fn criterion_5() -> Outcome {
    let (blocks, x_star) = sorted_blocks();
    let (c, cert) = function_to_coloring(&sorted_function(), &blocks, x_star, DEFAULT_PROBE_CAP).map_err(err)?;
    let c: Coloring = c.into();
    ensure!(c.dim() == 3, "d = {}", c.dim());
    check_nontrivial(&c, DEFAULT_WIDTH_CAP).map_err(err)?;
    let report = exact_report(&c, DEFAULT_PROBE_CAP).map_err(err)?;
    ensure!(report.mode == ScanMode::ExactPeriod, "mode {:?}", report.mode);
    ensure!(report.s.value <= 2, "s(C) = {}", report.s.value);
    ensure!(cert.verify().map_err(err)?.iter().all(|c| c.holds), "certificate fails");
    Ok(format!("d = 3, s(C) = {} <= 2 = s(f) over one full period", report.s.value))
}

/// The coloring-to-function instance on `slice_coloring(2)`.
fn criterion_6() -> Outcome {
    let c: Coloring = slice_coloring(2).map_err(err)?.into();
    let report = exact_report(&c, DEFAULT_PROBE_CAP).map_err(err)?;
    let g = coloring_to_function(&c, ReductionOptions::default()).map_err(err)?;
    let table = g.table.as_ref().ok_or("no explicit table")?;
    ensure!(table.n() == 18, "n = {}", table.n());
    ensure!(!table.get(0), "f(0) = 1");
    let blocks = g.oracle.blocks();
    ensure!(blocks.len() == 6, "{} blocks", blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        ensure!(table.get(b.0), "block {i} not sensitive at 0");
        ensure!(blocks[..i].iter().all(|a| a.is_disjoint(*b)), "block {i} overlaps");
    }
    let s_f = s_of(table) as usize;
    let k = 3;
    ensure!(s_f <= k * report.r.value, "s(f) = {s_f} > k r(C) = {}", k * report.r.value);
    ensure!(s_f <= 6, "s(f) = {s_f} > 6");
    ensure!(s_f <= k * report.s.value, "s(f) = {s_f} > k s(C)");
    ensure!(g.certificate.verify().map_err(err)?.iter().all(|c| c.holds), "certificate fails");
    Ok(format!(
        "18 variables, f(0) = 0, 6 disjoint sensitive blocks, s(f) = {s_f} <= 6 = k r(C) (k s(C) = {})",
        k * report.s.value
    ))
}

/// `bs_l <= c_l s^l` on every 4-variable function.
fn criterion_7() -> Outcome {
    let report = kk_exhaustive(4).map_err(err)?;
    ensure!(report.holds(), "failing checks: {:?}", report.failures());
    let c2 = kk_constant(2).map_err(err)?.value.to_string();
    let c3 = kk_constant(3).map_err(err)?.value.to_string();
    ensure!(c2 == "2" && c3 == "9/8", "c_2 = {c2}, c_3 = {c3}");
    ensure!(kk_fraction(2) == (2, 1) && kk_fraction(3) == (9, 8), "oracle constants");
    let counterexamples: usize = (0..1u64 << 16)
        .filter(|&t| {
            let f = TruthTable::from_u64(4, t).unwrap();
            let s = s_of(&f);
            (1..=s).any(|l| {
                let (num, den) = kk_fraction(l);
                naive_bs_l(&f, l) as u128 * den > num * u128::from(s).pow(l)
            })
        })
        .count();
    ensure!(counterexamples == 0, "{counterexamples} oracle counterexamples");
    Ok(format!("65536 functions, c_2 = {c2}, c_3 = {c3}, 0 counterexamples"))
}

/// Coloring with a blue point at `+1` on each axis and nowhere else.
fn unit_coloring(d: usize) -> SlicedColoring {
    let slices = (0..d).map(|axis| Slice { axis, c: 1, zeros: (0..d).filter(|&i| i != axis).collect() }).collect();
    SlicedColoring::new(d, slices).unwrap()
}

/// `s(C) >= d^(1/k) / e^2` on every constructed coloring with exact measures.
fn criterion_8() -> Outcome {
    let (blocks, x_star) = sorted_blocks();
    let sorted: Coloring = function_to_coloring(&sorted_function(), &blocks, x_star, DEFAULT_PROBE_CAP)
        .map_err(err)?
        .0
        .into();
    let colorings: Vec<(&str, Coloring)> = vec![
        ("slice_coloring(2)", slice_coloring(2).map_err(err)?.into()),
        ("slice_coloring(3)", slice_coloring(3).map_err(err)?.into()),
        ("slice_group(3)", slice_group(3).map_err(err)?.into()),
        ("unit coloring d = 5", unit_coloring(5).into()),
        ("sorted function coloring", sorted),
    ];
    let mut parts = Vec::new();
    for (name, c) in colorings {
        let width = check_nontrivial(&c, DEFAULT_WIDTH_CAP).map_err(err)?;
        let report = exact_report(&c, DEFAULT_PROBE_CAP).map_err(err)?;
        ensure!(report.mode.is_exact(), "{name}: mode {:?}", report.mode);
        let d = c.dim();
        let bound = (-2.0f64).exp() * (d as f64).powf(1.0 / width.k as f64);
        ensure!(report.s.value as f64 + 1e-12 >= bound, "{name}: s = {} < {bound}", report.s.value);
        let check = lattice_lower_bound_check(&report, d, width.k);
        ensure!(check.holds(), "{name}: library check fails");
        if width.k == 1 {
            ensure!(report.s.value >= d, "{name}: s = {} < d = {d} with k = 1", report.s.value);
        }
        parts.push(format!("{name}: {} >= {bound:.4}", report.s.value));
    }
    Ok(parts.join("; "))
}

/// Every subset of `0..m` in which `ok` holds for all pairs; the largest size.
fn brute_max_subset(m: usize, ok: impl Fn(usize, usize) -> bool) -> usize {
    (0u32..1 << m)
        .filter(|&set| {
            (0..m).all(|i| set >> i & 1 == 0 || (i + 1..m).all(|j| set >> j & 1 == 0 || ok(i, j)))
        })
        .map(|set| set.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn pinned(s: &Slice, i: usize) -> Option<i64> {
    if i == s.axis {
        Some(s.c)
    } else if s.zeros.contains(&i) {
        Some(0)
    } else {
        None
    }
}

/// Tightness of `d <= s^R (2 s^B - 1)` on the slice colorings.
fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    for n in [2, 3] {
        let c = slice_coloring(n).map_err(err)?;
        let report = exact_report(&c.clone().into(), DEFAULT_PROBE_CAP).map_err(err)?;
        let (sr, sb) = (report.sr.value, report.sb.value);
        ensure!(c.d == sr * (2 * sb - 1), "n = {n}: d = {} vs {sr}(2*{sb}-1)", c.d);
        ensure!(sliced_bound_check(&c, &report).map_err(err)?.holds(), "n = {n}: chain fails");

        let g = slice_graph(&c).map_err(err)?;
        let alpha = max_independent_set(&g.undirected()).map_err(err)?.len();
        // Oracle: i -> j when axis i is pinned to 0 by slice j.
        let edge = |i: usize, j: usize| c.slices[j].zeros.contains(&c.slices[i].axis);
        let alpha_oracle = brute_max_subset(c.d, |i, j| !edge(i, j) && !edge(j, i));
        ensure!(alpha == sr && alpha_oracle == sr, "n = {n}: alpha = {alpha}, oracle {alpha_oracle}, s^R = {sr}");

        let mutual = max_mutual_intersection(&c).map_err(err)?.size;
        let agree = |a: &Slice, b: &Slice| (0..c.d).all(|i| match (pinned(a, i), pinned(b, i)) {
            (Some(x), Some(y)) => x == y,
            _ => true,
        });
        let mutual_oracle = brute_max_subset(c.d, |i, j| agree(&c.slices[i], &c.slices[j]));
        ensure!(mutual == sr && mutual_oracle == sr, "n = {n}: mutual = {mutual}, oracle {mutual_oracle}");
        parts.push(format!("n = {n}: d = {} = {sr}(2*{sb}-1), alpha = mutual = {sr}", c.d));
    }
    Ok(parts.join("; "))
}

/// Property suites.
fn criterion_10() -> Outcome {
    let scan = exhaustive_scan(4).map_err(err)?;
    ensure!(scan.bs1_mismatches.is_empty(), "bs_1 != s on {:?}", scan.bs1_mismatches);
    ensure!(scan.bss_mismatches.is_empty(), "bs_s != bs on {:?}", scan.bss_mismatches);
    let oracle_bad = (0..1u64 << 16)
        .filter(|&t| {
            let f = TruthTable::from_u64(4, t).unwrap();
            let s = s_of(&f);
            naive_bs_l(&f, 1) != s as usize || (s > 0 && naive_bs_l(&f, s) != naive_bs(&f))
        })
        .count();
    ensure!(oracle_bad == 0, "oracle finds {oracle_bad} identity failures");

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for t in 0..1000u32 {
        let n = 1 + t % 10;
        let bits: Vec<bool> = (0..1u64 << n).map(|_| rng.random()).collect();
        let f = TruthTable::from_fn(n, |x| bits[x as usize]).unwrap();
        let counts = sensitivity_bitmap(&f);
        ensure!(
            (0..1u64 << n).all(|x| u32::from(counts[x as usize]) == naive_sensitivity_at(&f, x)),
            "kernel differs from naive on table {t}"
        );
    }

    let (blocks, x_star) = sorted_blocks();
    let sorted: Coloring = function_to_coloring(&sorted_function(), &blocks, x_star, DEFAULT_PROBE_CAP)
        .map_err(err)?
        .0
        .into();
    let exact: Vec<(&str, Coloring)> = vec![
        ("slice_coloring(2)", slice_coloring(2).map_err(err)?.into()),
        ("slice_group(2)", slice_group(2).map_err(err)?.into()),
        ("slice_group(3)", slice_group(3).map_err(err)?.into()),
        ("unit coloring d = 5", unit_coloring(5).into()),
        ("sorted function coloring", sorted),
    ];
    let mut reports: Vec<(String, ColoringReport)> = Vec::new();
    for (name, c) in &exact {
        let original = exact_report(c, DEFAULT_PROBE_CAP).map_err(err)?;
        let doubled = exact_report(&double_coloring(c.clone()), DEFAULT_PROBE_CAP).map_err(err)?;
        ensure!(doubled.mode.is_exact(), "{name}: doubled scan not exact");
        ensure!(doubled.s.value == original.r.value, "{name}: s(doubled) = {} != r = {}", doubled.s.value, original.r.value);
        reports.push((name.to_string(), original));
        reports.push((format!("doubled {name}"), doubled));
    }
    let c3 = slice_coloring(3).map_err(err)?;
    reports.push(("slice_coloring(3)".into(), exact_report(&c3.clone().into(), DEFAULT_PROBE_CAP).map_err(err)?));
    reports.push((
        "slice_coloring(3) sampled".into(),
        sampled_report(&c3, &SampleRegion::Representative, 100_000, 7, &[]).map_err(err)?,
    ));
    // Each sensitive axis contributes one or two differing neighbors, so
    // r <= s <= 2r. The transposed form s <= r fails whenever some point
    // sees both neighbors on an axis differ, e.g. s = 4, r = 2 below.
    for (name, r) in &reports {
        ensure!(r.r.value <= r.s.value && r.s.value <= 2 * r.r.value, "{name}: s = {}, r = {}", r.s.value, r.r.value);
    }
    let transposed = reports.iter().filter(|(_, r)| r.s.value > r.r.value).count();
    Ok(format!(
        "bs_1 = s and bs_s = bs on 65536 functions; kernel = naive on 1000 tables; \
         r <= s <= 2r on {} reports ({transposed} with s > r); s(doubled) = r on {} colorings",
        reports.len(),
        exact.len()
    ))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "sorted function: s = 2, bs = 3", Duration::from_secs(1), criterion_1),
        (2, "Rubinstein n = 4: s = 4, bs = 8", Duration::from_secs(300), criterion_2),
        (3, "slice coloring n = 2: r = 2, d = 6", Duration::from_secs(10), criterion_3),
        (4, "slice coloring n = 3: witness, rows, tripwire", Duration::from_secs(60), criterion_4),
        (5, "function to coloring on the sorted function", Duration::from_secs(10), criterion_5),
        (6, "coloring to function on slice_coloring(2)", Duration::from_secs(120), criterion_6),
        (7, "bs_l <= c_l s^l on all 4-variable functions", Duration::from_secs(600), criterion_7),
        (8, "s(C) >= d^(1/k)/e^2 on exact colorings", Duration::from_secs(1), criterion_8),
        (9, "d = s^R (2 s^B - 1) tightness, n = 2, 3", Duration::from_secs(10), criterion_9),
        (10, "property suites", Duration::from_secs(600), criterion_10),
    ];
    let mut failed = 0;
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed <= budget => Ok(detail),
            Ok(detail) => Err(format!("{detail}; over budget {budget:?}")),
            Err(e) => Err(e),
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        println!("{tag} criterion {id}: {title} [{:.3}s]: {detail}", elapsed.as_secs_f64());
        failed += usize::from(outcome.is_err());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
