//! The two directions between Boolean functions and lattice colorings.
//!
//! [`function_to_coloring`] turns `d` disjoint sensitive blocks of `f` into
//! a mirror-periodic coloring of `Z^d` whose sensitivity is at most `s(f)`.
//! [`coloring_to_function`] turns a non-trivial coloring of min-width `k`
//! into a function with `bs(f) >= d` and `s(f) <= k r(C) <= k s(C)`, where
//! the bits of block `i` count how far along axis `i` the input sits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{sensitivity, sensitivity_at, Block, BooleanFunction, TruthTable, MAX_VARS};
use crate::lattice::{
    check_nontrivial, exact_report, exact_report_periodic, point_sensitivity, reflect, sampled_report,
    axis_sensitivity, ColorOracle, Coloring, ColoringReport, MirrorPeriodicColoring, Point, SampleRegion,
    ScanMode, DEFAULT_PROBE_CAP, DEFAULT_WIDTH_CAP,
};
use crate::report::{Check, Relation};
use crate::{Error, Result};

/// Order in which a block's bits are switched on.
pub const BLOCK_ORDER: &str = "ascending variable index";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionOptions {
    /// Search radius for blue axis points.
    pub width_cap: u64,
    /// Color-query budget for exact coloring scans.
    pub probe_cap: u128,
    /// Random inputs tried when `s(f)` cannot be computed exhaustively.
    pub samples: u64,
    pub seed: u64,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions { width_cap: DEFAULT_WIDTH_CAP, probe_cap: DEFAULT_PROBE_CAP, samples: 100_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "direction", rename_all = "kebab-case")]
pub enum ReductionCertificate {
    FunctionToColoring(FunctionToColoringCertificate),
    ColoringToFunction(ColoringToFunctionCertificate),
}

impl ReductionCertificate {
    pub fn checks(&self) -> &[Check] {
        match self {
            ReductionCertificate::FunctionToColoring(c) => &c.checks,
            ReductionCertificate::ColoringToFunction(c) => &c.checks,
        }
    }

    pub fn source_fingerprint(&self) -> &str {
        match self {
            ReductionCertificate::FunctionToColoring(c) => &c.source_fingerprint,
            ReductionCertificate::ColoringToFunction(c) => &c.source_fingerprint,
        }
    }

    pub fn target_fingerprint(&self) -> &str {
        match self {
            ReductionCertificate::FunctionToColoring(c) => &c.target_fingerprint,
            ReductionCertificate::ColoringToFunction(c) => &c.target_fingerprint,
        }
    }

    /// Re-checks the certificate from its embedded data and witnesses.
    /// Returns one check per replayed fact; the certificate is valid iff
    /// all of them hold.
    pub fn verify(&self) -> Result<Vec<Check>> {
        match self {
            ReductionCertificate::FunctionToColoring(c) => c.verify(),
            ReductionCertificate::ColoringToFunction(c) => c.verify(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionToColoringCertificate {
    /// Source function in truth-table text form.
    pub source: String,
    pub source_fingerprint: String,
    pub target: Coloring,
    pub target_fingerprint: String,
    pub blocks: Vec<Block>,
    pub x_star: u64,
    /// True when `f(x_star) = 1` and outputs were swapped.
    pub output_complemented: bool,
    pub block_order: String,
    /// Input attaining `s(f)`.
    pub function_witness: u64,
    /// Point attaining `s(C)`.
    pub coloring_witness: Option<Point>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringToFunctionCertificate {
    pub source: Coloring,
    pub source_fingerprint: String,
    /// Fingerprint of the explicit table, or of the oracle description.
    pub target_fingerprint: String,
    pub reflection_signs: Vec<i8>,
    /// `b_i`; block `i` is the next `b_i` variables.
    pub block_sizes: Vec<u64>,
    pub k: u64,
    pub explicit_table: bool,
    pub coloring_mode: ScanMode,
    pub s_coloring: usize,
    pub s_coloring_witness: Option<Point>,
    pub r_coloring: usize,
    pub r_coloring_witness: Option<Point>,
    /// `s(f)` if exhaustive, otherwise the largest value seen.
    pub s_function: u32,
    pub s_function_witness: u64,
    pub checks: Vec<Check>,
}

/// Function produced from a coloring: `f(y) = C(z_1, ..., z_d)` with `z_i`
/// the number of ones in block `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCountFunction {
    coloring: Coloring,
    sizes: Vec<u64>,
    offsets: Vec<u32>,
    n: u32,
}

impl BlockCountFunction {
    pub fn new(coloring: Coloring, sizes: Vec<u64>) -> Result<Self> {
        if sizes.len() != coloring.dim() {
            return Err(Error::Dimension { expected: coloring.dim(), got: sizes.len() });
        }
        let total: u64 = sizes.iter().sum();
        if total > 64 || sizes.contains(&0) {
            return Err(Error::resource("block-count function variables", total as u128, 64));
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut at = 0u32;
        for &b in &sizes {
            offsets.push(at);
            at += b as u32;
        }
        Ok(BlockCountFunction { coloring, sizes, offsets, n: at })
    }

    pub fn blocks(&self) -> Vec<Block> {
        self.sizes.iter().zip(&self.offsets).map(|(&b, &o)| Block(low_mask(b as u32) << o)).collect()
    }

    pub fn block_sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    /// Lattice point `z` read by input `y`.
    pub fn point(&self, y: u64) -> Point {
        self.sizes
            .iter()
            .zip(&self.offsets)
            .map(|(&b, &o)| ((y >> o) & low_mask(b as u32)).count_ones() as i64)
            .collect()
    }

    fn fingerprint(&self) -> String {
        let sizes: Vec<String> = self.sizes.iter().map(u64::to_string).collect();
        crate::fingerprint(
            format!("block-count {} {}", sizes.join(","), serde_json::to_string(&self.coloring).expect("serialize"))
                .as_bytes(),
        )
    }
}

impl BooleanFunction for BlockCountFunction {
    fn num_vars(&self) -> u32 {
        self.n
    }

    fn value(&self, y: u64) -> bool {
        self.coloring.color(&self.point(y)).is_blue()
    }
}

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn validate_blocks<F: BooleanFunction + ?Sized>(f: &F, blocks: &[Block], x: u64) -> Result<()> {
    let n = f.num_vars();
    f.eval(x)?;
    for (i, &b) in blocks.iter().enumerate() {
        if b.is_empty() || (n < 64 && b.0 >> n != 0) {
            return Err(Error::BlockOutOfRange { mask: b.0, n });
        }
        if let Some(&other) = blocks[..i].iter().find(|o| !o.is_disjoint(b)) {
            return Err(Error::OverlappingBlocks { first: other.0, second: b.0 });
        }
        if f.value(x) == f.value(x ^ b.0) {
            return Err(Error::NotSensitive { mask: b.0, input: x });
        }
    }
    Ok(())
}

fn base_input(blocks: &[Vec<u32>], m: &[u64]) -> u64 {
    blocks
        .iter()
        .zip(m)
        .flat_map(|(vars, &mi)| vars[..mi as usize].iter())
        .fold(0, |acc, &v| acc | 1 << (v - 1))
}

/// Mirror boundary property: every boundary cell of the fundamental box
/// has the same color as its neighbor across the boundary.
fn mirror_boundary_holds(c: &MirrorPeriodicColoring) -> bool {
    let b = c.box_sizes().to_vec();
    let d = b.len();
    let cells: u64 = b.iter().map(|&x| x + 1).product();
    (0..cells).into_par_iter().all(|idx| {
        let mut m = vec![0i64; d];
        let mut rest = idx;
        for i in (0..d).rev() {
            m[i] = (rest % (b[i] + 1)) as i64;
            rest /= b[i] + 1;
        }
        let own = c.color(&m);
        let mut q = m.clone();
        (0..d).all(|i| {
            let across = [(m[i] == 0).then_some(-1), (m[i] == b[i] as i64).then_some(b[i] as i64 + 1)];
            across.into_iter().flatten().all(|t| {
                q[i] = t;
                let same = c.color(&q) == own;
                q[i] = m[i];
                same
            })
        })
    })
}

/// Builds the coloring of `Z^d` from `d` disjoint blocks sensitive at
/// `x_star`.
pub fn function_to_coloring(
    f: &TruthTable,
    blocks: &[Block],
    x_star: u64,
    probe_cap: u128,
) -> Result<(MirrorPeriodicColoring, ReductionCertificate)> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("at least one block is required".into()));
    }
    validate_blocks(f, blocks, x_star)?;
    let output_complemented = f.get(x_star);
    let mut g = f.complement_inputs(x_star)?;
    if output_complemented {
        g = g.negate();
    }
    let vars: Vec<Vec<u32>> = blocks.iter().map(|b| b.vars()).collect();
    let sizes: Vec<u64> = vars.iter().map(|v| v.len() as u64).collect();
    let coloring = MirrorPeriodicColoring::from_cells(sizes.clone(), |m| g.get(base_input(&vars, m)))?;

    let report = exact_report_periodic(&coloring, probe_cap)?;
    let sf = sensitivity(f);
    let d = blocks.len();
    let checks = vec![
        Check::flag("origin is red", !coloring.color(&vec![0; d]).is_blue()),
        Check::flag(
            "blue at distance b_i on every positive axis",
            (0..d).all(|i| {
                let mut p = vec![0; d];
                p[i] = sizes[i] as i64;
                coloring.color(&p).is_blue()
            }),
        ),
        Check::flag("mirror boundary neighbors agree", mirror_boundary_holds(&coloring)),
        Check::flag(
            "blocks disjoint and sensitive at x_star, so bs(f) >= d",
            validate_blocks(f, blocks, x_star).is_ok(),
        ),
        Check::new("s(C) <= s(f)", report.s.value, Relation::Le, sf.s),
    ];
    let target = Coloring::MirrorPeriodic(coloring.clone());
    let cert = FunctionToColoringCertificate {
        source: f.to_string(),
        source_fingerprint: f.fingerprint(),
        target_fingerprint: target.fingerprint(),
        target,
        blocks: blocks.to_vec(),
        x_star,
        output_complemented,
        block_order: BLOCK_ORDER.into(),
        function_witness: sf.witness,
        coloring_witness: report.s.witness.clone(),
        checks,
    };
    Ok((coloring, ReductionCertificate::FunctionToColoring(cert)))
}

impl FunctionToColoringCertificate {
    fn verify(&self) -> Result<Vec<Check>> {
        let f: TruthTable = self.source.parse()?;
        let Coloring::MirrorPeriodic(c) = &self.target else {
            return Err(Error::InvalidArgument("target must be a mirror-periodic coloring".into()));
        };
        let d = self.blocks.len();
        let claimed = self.checks.iter().find(|c| c.name == "s(C) <= s(f)");
        let (sc, sf) = match claimed {
            Some(Check { lhs: crate::report::Quantity::Int(a), rhs: crate::report::Quantity::Int(b), .. }) => (*a, *b),
            _ => return Err(Error::InvalidArgument("certificate lacks the s(C) <= s(f) claim".into())),
        };
        let coloring_point = self.coloring_witness.clone().unwrap_or_else(|| vec![0; d]);
        let mut out = vec![
            Check::flag("source fingerprint matches", f.fingerprint() == self.source_fingerprint),
            Check::flag("target fingerprint matches", self.target.fingerprint() == self.target_fingerprint),
            Check::flag("blocks disjoint and sensitive at x_star", validate_blocks(&f, &self.blocks, self.x_star).is_ok()),
            Check::flag(
                "box sizes equal block sizes",
                c.box_sizes().iter().zip(&self.blocks).all(|(&b, blk)| b == blk.len() as u64) && c.dim() == d,
            ),
            Check::flag("origin is red", !c.color(&vec![0; d]).is_blue()),
            Check::new("s(f) witness replays", sensitivity_at(&f, self.function_witness) as i64, Relation::Eq, sf),
            Check::new("s(C) witness replays", point_sensitivity(c, &coloring_point) as i64, Relation::Eq, sc),
            Check::flag("recorded checks hold", self.checks.iter().all(|c| c.holds && c.is_consistent())),
        ];
        // Spot-check the cell coloring rule at the witness cell and the far corner.
        let vars: Vec<Vec<u32>> = self.blocks.iter().map(|b| b.vars()).collect();
        let corner: Vec<u64> = c.box_sizes().to_vec();
        let witness_cell = c.fold(&coloring_point);
        let rule = [corner, witness_cell].iter().all(|m| {
            let x = base_input(&vars, m) ^ self.x_star;
            (f.get(x) ^ self.output_complemented) == c.cell_color(m).is_blue()
        });
        out.push(Check::flag("cell colors follow f", rule));
        Ok(out)
    }
}

/// The function of a non-trivial coloring, with its certificate.
#[derive(Debug, Clone)]
pub struct ColoringFunction {
    pub oracle: BlockCountFunction,
    /// Present when the total number of variables is at most 24.
    pub table: Option<TruthTable>,
    pub certificate: ReductionCertificate,
}

/// Builds `f` on `sum b_i` variables from a non-trivial coloring.
pub fn coloring_to_function(c: &Coloring, opts: ReductionOptions) -> Result<ColoringFunction> {
    let width = check_nontrivial(c, opts.width_cap)?;
    let signs = width.positive_signs();
    let reflected = if signs.iter().all(|&s| s > 0) { c.clone() } else { reflect(c.clone(), signs.clone())? };
    let sizes: Vec<u64> = width.axes.iter().map(|a| a.distance).collect();
    let oracle = BlockCountFunction::new(reflected, sizes.clone())?;
    let n = oracle.num_vars();
    let table = if n <= MAX_VARS { Some(TruthTable::from_function(&oracle)?) } else { None };

    let coloring_report = measure_coloring(c, &opts, width.k)?;
    let coloring_exact = coloring_report.mode.is_exact();
    let (s_function, s_function_witness, function_exact) = match &table {
        Some(t) => {
            let s = sensitivity(t);
            (s.s, s.witness, true)
        }
        None => {
            let (s, w) = sampled_sensitivity(&oracle, opts.samples, opts.seed);
            (s, w, false)
        }
    };
    let k = width.k;
    let blocks = oracle.blocks();
    let exact = |check: Check, e: bool| if e { check } else { check.inexact() };
    let checks = vec![
        Check::flag("f(0) = 0", !oracle.value(0)),
        Check::flag(
            "every axis block is sensitive at 0, so bs(f) >= d",
            blocks.iter().all(|b| oracle.value(b.0)),
        ),
        exact(
            Check::new("s(f) <= k*r(C)", s_function, Relation::Le, k * coloring_report.r.value as u64),
            coloring_exact && function_exact,
        ),
        exact(
            Check::new("s(f) <= k*s(C)", s_function, Relation::Le, k * coloring_report.s.value as u64),
            coloring_exact && function_exact,
        ),
        Check::new("r(C) <= s(C)", coloring_report.r.value, Relation::Le, coloring_report.s.value),
    ];
    let target_fingerprint = match &table {
        Some(t) => t.fingerprint(),
        None => oracle.fingerprint(),
    };
    let cert = ColoringToFunctionCertificate {
        source: c.clone(),
        source_fingerprint: c.fingerprint(),
        target_fingerprint,
        reflection_signs: signs,
        block_sizes: sizes,
        k,
        explicit_table: table.is_some(),
        coloring_mode: coloring_report.mode,
        s_coloring: coloring_report.s.value,
        s_coloring_witness: coloring_report.s.witness.clone(),
        r_coloring: coloring_report.r.value,
        r_coloring_witness: coloring_report.r.witness.clone(),
        s_function,
        s_function_witness,
        checks,
    };
    Ok(ColoringFunction { oracle, table, certificate: ReductionCertificate::ColoringToFunction(cert) })
}

fn measure_coloring(c: &Coloring, opts: &ReductionOptions, k: u64) -> Result<ColoringReport> {
    match exact_report(c, opts.probe_cap) {
        Ok(r) => Ok(r),
        Err(Error::ResourceLimit { .. }) | Err(Error::NoExactMethod(_)) => {
            let region = if c.representatives().is_some() {
                SampleRegion::Representative
            } else {
                let radius = k as i64 + 1;
                SampleRegion::Box { lo: -radius, hi: radius }
            };
            sampled_report(c, &region, opts.samples, opts.seed, &[vec![0; c.dim()]])
        }
        Err(e) => Err(e),
    }
}

/// Largest sensitivity seen at `0` and at `samples` random inputs; the
/// smallest such input is returned with it.
fn sampled_sensitivity<F: BooleanFunction + ?Sized>(f: &F, samples: u64, seed: u64) -> (u32, u64) {
    let n = f.num_vars();
    let mask = low_mask(n);
    const CHUNK: u64 = 4096;
    let sampled = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut best = (0u32, u64::MAX);
            for _ in chunk * CHUNK..((chunk + 1) * CHUNK).min(samples) {
                let y = rng.random::<u64>() & mask;
                let s = sensitivity_at(f, y);
                if s > best.0 || (s == best.0 && y < best.1) {
                    best = (s, y);
                }
            }
            best
        })
        .reduce(|| (0, u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let at_zero = (sensitivity_at(f, 0), 0);
    if at_zero.0 >= sampled.0 {
        at_zero
    } else {
        sampled
    }
}

impl ColoringToFunctionCertificate {
    fn verify(&self) -> Result<Vec<Check>> {
        self.source.validate()?;
        let reflected = if self.reflection_signs.iter().all(|&s| s > 0) {
            self.source.clone()
        } else {
            reflect(self.source.clone(), self.reflection_signs.clone())?
        };
        let oracle = BlockCountFunction::new(reflected, self.block_sizes.clone())?;
        let d = self.source.dim();
        let point_or_origin = |w: &Option<Point>| w.clone().unwrap_or_else(|| vec![0; d]);
        let replay_axis = |axis: usize, t: i64| {
            let mut p = vec![0; d];
            p[axis] = t;
            oracle.coloring().color(&p).is_blue()
        };
        let mut out = vec![
            Check::flag("source fingerprint matches", self.source.fingerprint() == self.source_fingerprint),
            Check::flag("f(0) = 0", !oracle.value(0)),
            Check::flag("every axis block is sensitive at 0", oracle.blocks().iter().all(|b| oracle.value(b.0))),
            Check::flag(
                "b_i is the nearest blue distance on the positive axis",
                self.block_sizes.iter().enumerate().all(|(i, &b)| {
                    let b = b as i64;
                    replay_axis(i, b) && (1..b).all(|t| !replay_axis(i, t) && !replay_axis(i, -t))
                }),
            ),
            Check::new("k = max b_i", self.k, Relation::Eq, self.block_sizes.iter().copied().max().unwrap_or(0)),
            Check::new(
                "s(C) witness replays",
                point_sensitivity(&self.source, &point_or_origin(&self.s_coloring_witness)),
                Relation::Eq,
                self.s_coloring,
            ),
            Check::new(
                "r(C) witness replays",
                axis_sensitivity(&self.source, &point_or_origin(&self.r_coloring_witness)),
                Relation::Eq,
                self.r_coloring,
            ),
            Check::new(
                "s(f) witness replays",
                sensitivity_at(&oracle, self.s_function_witness),
                Relation::Eq,
                self.s_function,
            ),
            Check::flag("recorded checks hold", self.checks.iter().all(|c| c.holds && c.is_consistent())),
        ];
        if self.explicit_table {
            let t = TruthTable::from_function(&oracle)?;
            out.push(Check::flag("target fingerprint matches", t.fingerprint() == self.target_fingerprint));
        }
        Ok(out)
    }
}

/// Number of random within-block permutations tried per block.
pub const SYMMETRY_PERMUTATIONS: usize = 100;

/// Whether `f` is unchanged by [`SYMMETRY_PERMUTATIONS`] random permutations
/// of the bits inside each block. `block_sizes` lists consecutive blocks
/// starting at variable 1.
///
/// Up to 24 variables every input is compared; above that, `samples`
/// random inputs per permutation.
pub fn block_symmetry_check<F: BooleanFunction + ?Sized>(f: &F, block_sizes: &[u64], samples: u64, seed: u64) -> bool {
    let n = f.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offset = 0u32;
    for &b in block_sizes {
        let b = b as u32;
        if b >= 2 {
            for _ in 0..SYMMETRY_PERMUTATIONS {
                let mut perm: Vec<u32> = (0..b).collect();
                perm.shuffle(&mut rng);
                let apply = |y: u64| -> u64 {
                    let inside = (y >> offset) & low_mask(b);
                    let moved = perm
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (i, &to)| acc | ((inside >> i) & 1) << to);
                    (y & !(low_mask(b) << offset)) | moved << offset
                };
                let invariant = if n <= MAX_VARS {
                    (0..1u64 << n).into_par_iter().all(|y| f.value(y) == f.value(apply(y)))
                } else {
                    let mut sample_rng = ChaCha8Rng::seed_from_u64(rng.random());
                    (0..samples).all(|_| {
                        let y = sample_rng.random::<u64>() & low_mask(n);
                        f.value(y) == f.value(apply(y))
                    })
                };
                if !invariant {
                    return false;
                }
            }
        }
        offset += b;
    }
    true
}
