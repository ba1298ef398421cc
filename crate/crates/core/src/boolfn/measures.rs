use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{kernel::sensitivity_bitmap, packing::max_disjoint_family, Block, BooleanFunction, TruthTable};
use crate::{Error, Result};

/// Default limit on the number of minimal blocks considered at one input.
pub const DEFAULT_CANDIDATE_CAP: usize = 100_000;

/// Number of `i` with `f(x) != f(x^i)`.
pub fn sensitivity_at<F: BooleanFunction + ?Sized>(f: &F, x: u64) -> u32 {
    let fx = f.value(x);
    (0..f.num_vars()).filter(|&i| f.value(x ^ 1 << i) != fx).count() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sensitivity {
    pub s: u32,
    pub s0: u32,
    pub s1: u32,
    /// Smallest input attaining `s`.
    pub witness: u64,
    /// Smallest input with output 0 attaining `s0`; `None` if `f` is never 0.
    pub witness0: Option<u64>,
    pub witness1: Option<u64>,
}

/// `s`, `s0` and `s1` of a table, from the bit-parallel kernel.
pub fn sensitivity(f: &TruthTable) -> Sensitivity {
    let counts = sensitivity_bitmap(f);
    // (value, -index) so that max keeps the smallest index on ties.
    type Best = Option<(u32, std::cmp::Reverse<u64>)>;
    let (b0, b1): (Best, Best) = counts
        .par_iter()
        .enumerate()
        .with_min_len(4096)
        .fold(
            || (None, None),
            |(b0, b1): (Best, Best), (x, &c)| {
                let cand = Some((c as u32, std::cmp::Reverse(x as u64)));
                if f.get(x as u64) {
                    (b0, b1.max(cand))
                } else {
                    (b0.max(cand), b1)
                }
            },
        )
        .reduce(|| (None, None), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let s0 = b0.map_or(0, |b| b.0);
    let s1 = b1.map_or(0, |b| b.0);
    let witness = match (b0, b1) {
        (Some(a), Some(b)) => a.max(b).1 .0,
        (Some(a), None) | (None, Some(a)) => a.1 .0,
        (None, None) => unreachable!("tables are nonempty"),
    };
    Sensitivity {
        s: s0.max(s1),
        s0,
        s1,
        witness,
        witness0: b0.map(|b| b.1 .0),
        witness1: b1.map(|b| b.1 .0),
    }
}

/// Masks of popcount `k` below `2^n`, ascending.
fn masks_of_size(n: u32, k: u32) -> impl Iterator<Item = u64> {
    let limit = if n >= 64 { u64::MAX } else { 1u64 << n };
    let first = if k == 0 || k > n { None } else { Some(u64::MAX >> (64 - k)) };
    std::iter::successors(first, move |&x| {
        let c = x & x.wrapping_neg();
        let r = x.checked_add(c)?;
        Some((((r ^ x) >> 2) / c) | r)
    })
    .take_while(move |&x| n >= 64 || x < limit)
}

fn check_block<F: BooleanFunction + ?Sized>(f: &F, b: Block) -> Result<()> {
    let n = f.num_vars();
    if b.is_empty() || (n < 64 && b.0 >> n != 0) {
        return Err(Error::BlockOutOfRange { mask: b.0, n });
    }
    Ok(())
}

fn is_sensitive<F: BooleanFunction + ?Sized>(f: &F, x: u64, fx: bool, mask: u64) -> bool {
    f.value(x ^ mask) != fx
}

/// Every sensitive block at `x` of size at most `max_size`, ascending by mask.
pub fn sensitive_blocks_at<F: BooleanFunction + ?Sized>(f: &F, x: u64, max_size: u32) -> Vec<Block> {
    let fx = f.value(x);
    let mut out: Vec<Block> = (1..=max_size.min(f.num_vars()))
        .flat_map(|k| masks_of_size(f.num_vars(), k))
        .filter(|&m| is_sensitive(f, x, fx, m))
        .map(Block)
        .collect();
    out.sort_unstable();
    out
}

/// Whether no proper nonempty subset of the sensitive block `b` is sensitive at `x`.
pub fn is_minimal_block<F: BooleanFunction + ?Sized>(f: &F, x: u64, b: Block) -> Result<bool> {
    check_block(f, b)?;
    let fx = f.value(x);
    if !is_sensitive(f, x, fx, b.0) {
        return Err(Error::NotSensitive { mask: b.0, input: x });
    }
    let mut sub = (b.0 - 1) & b.0;
    while sub != 0 {
        if is_sensitive(f, x, fx, sub) {
            return Ok(false);
        }
        sub = (sub - 1) & b.0;
    }
    Ok(true)
}

/// Minimal sensitive blocks at `x` of size at most `max_size`, ascending by mask.
///
/// Sizes are scanned in increasing order, so a sensitive mask is minimal iff
/// it contains none of the minimal blocks already found.
pub fn minimal_blocks_at<F: BooleanFunction + ?Sized>(
    f: &F,
    x: u64,
    max_size: u32,
    cap: usize,
) -> Result<Vec<Block>> {
    let fx = f.value(x);
    let mut found: Vec<u64> = Vec::new();
    for k in 1..=max_size.min(f.num_vars()) {
        let before = found.len();
        for m in masks_of_size(f.num_vars(), k) {
            if is_sensitive(f, x, fx, m) && !found[..before].iter().any(|&b| b & m == b) {
                found.push(m);
                if found.len() > cap {
                    return Err(Error::resource("minimal sensitive blocks at one input", found.len() as u128, cap as u128));
                }
            }
        }
    }
    found.sort_unstable();
    Ok(found.into_iter().map(Block).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockOptions {
    /// Largest block considered; `None` means `s(f)`.
    pub max_block_size: Option<u32>,
    pub candidate_cap: usize,
}

impl Default for BlockOptions {
    fn default() -> Self {
        BlockOptions { max_block_size: None, candidate_cap: DEFAULT_CANDIDATE_CAP }
    }
}

/// A block sensitivity value with the input and disjoint family achieving it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockSensitivity {
    pub value: usize,
    pub input: u64,
    pub family: Vec<Block>,
}

impl BlockSensitivity {
    /// Re-checks the witness: the family has `value` pairwise-disjoint blocks,
    /// each sensitive at `input` and no larger than `max_size`.
    pub fn replays<F: BooleanFunction + ?Sized>(&self, f: &F, max_size: Option<u32>) -> bool {
        let n = f.num_vars();
        if n < 64 && self.input >> n != 0 {
            return false;
        }
        let fx = f.value(self.input);
        let mut used = 0u64;
        self.family.len() == self.value
            && self.family.iter().all(|b| {
                let ok = !b.is_empty()
                    && used & b.0 == 0
                    && (n >= 64 || b.0 >> n == 0)
                    && max_size.is_none_or(|l| b.len() <= l as usize)
                    && is_sensitive(f, self.input, fx, b.0);
                used |= b.0;
                ok
            })
    }
}

/// `bs(f, x)` over blocks of size at most `max_size`.
pub fn block_sensitivity_at<F: BooleanFunction + ?Sized>(f: &F, x: u64, max_size: u32) -> Result<BlockSensitivity> {
    let found = block_sensitivity_at_with(f, x, max_size, DEFAULT_CANDIDATE_CAP, None)?;
    Ok(found.expect("unbounded search always returns a family"))
}

/// Like [`block_sensitivity_at`], but returns `None` unless the value exceeds `beat`.
pub fn block_sensitivity_at_with<F: BooleanFunction + ?Sized>(
    f: &F,
    x: u64,
    max_size: u32,
    cap: usize,
    beat: Option<usize>,
) -> Result<Option<BlockSensitivity>> {
    let blocks: Vec<u64> = minimal_blocks_at(f, x, max_size, cap)?.into_iter().map(|b| b.0).collect();
    if let Some(t) = beat {
        if blocks.len() <= t {
            return Ok(None);
        }
    }
    Ok(max_disjoint_family(&blocks, beat).map(|idx| BlockSensitivity {
        value: idx.len(),
        input: x,
        family: idx.into_iter().map(|i| Block(blocks[i])).collect(),
    }))
}

/// `bs(f)` with the block size capped at `s(f)`.
pub fn block_sensitivity(f: &TruthTable) -> Result<BlockSensitivity> {
    block_sensitivity_with(f, BlockOptions::default())
}

/// Maximum of `bs(f, x)` over all inputs; the witness is the smallest
/// maximizing input with its lexicographically smallest maximum family.
pub fn block_sensitivity_with(f: &TruthTable, opts: BlockOptions) -> Result<BlockSensitivity> {
    let max_size = match opts.max_block_size {
        Some(l) => l.min(f.n()),
        None => sensitivity(f).s,
    };
    whole_table_search(f, max_size, opts.candidate_cap)
}

/// `bs_l(f)`, the block sensitivity restricted to blocks of size at most `l`.
pub fn l_block_sensitivity(f: &TruthTable, l: u32) -> Result<BlockSensitivity> {
    if l == 0 || l > f.n() {
        return Err(Error::InvalidArgument(format!("l must be in 1..={}, got {l}", f.n())));
    }
    whole_table_search(f, l, DEFAULT_CANDIDATE_CAP)
}

fn whole_table_search(f: &TruthTable, max_size: u32, cap: usize) -> Result<BlockSensitivity> {
    if max_size == 0 {
        return Ok(BlockSensitivity { value: 0, input: 0, family: Vec::new() });
    }
    // Shared lower bound across workers. Inputs are only skipped when they
    // cannot reach it (not merely tie it), so the smallest maximizing input
    // is always found regardless of scheduling.
    let global = AtomicUsize::new(0);
    const CHUNK: u64 = 256;
    let chunks = (f.len() as u64).div_ceil(CHUNK);
    let per_chunk: Result<Vec<Option<BlockSensitivity>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best: Option<BlockSensitivity> = None;
            for x in c * CHUNK..((c + 1) * CHUNK).min(f.len() as u64) {
                let shared = global.load(Ordering::Relaxed);
                let beat = match (&best, shared) {
                    (Some(b), g) => Some(b.value.max(g.saturating_sub(1))),
                    (None, 0) => None,
                    (None, g) => Some(g - 1),
                };
                if let Some(found) = block_sensitivity_at_with(f, x, max_size, cap, beat)? {
                    if best.as_ref().is_none_or(|b| found.value > b.value) {
                        global.fetch_max(found.value, Ordering::Relaxed);
                        best = Some(found);
                    }
                }
            }
            Ok(best)
        })
        .collect();
    let best = per_chunk?
        .into_iter()
        .flatten()
        .fold(None::<BlockSensitivity>, |acc, b| match acc {
            Some(a) if a.value >= b.value => Some(a),
            _ => Some(b),
        });
    Ok(best.expect("at least one input is searched without a bound"))
}

/// Every measure of a table, with witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub n: u32,
    pub s: u32,
    pub s0: u32,
    pub s1: u32,
    pub bs: usize,
    /// `bs_l` for `l = 1..=max(s, 1)`; larger `l` give `bs`.
    pub bs_l: BTreeMap<u32, usize>,
    pub block_size_cap: u32,
    pub sensitivity_witness: Sensitivity,
    pub bs_witness: BlockSensitivity,
    pub bs_l_witnesses: BTreeMap<u32, BlockSensitivity>,
}

pub fn measure(f: &TruthTable, opts: BlockOptions) -> Result<MeasureReport> {
    let sens = sensitivity(f);
    let cap = opts.max_block_size.unwrap_or(sens.s).min(f.n());
    let bs = whole_table_search(f, cap, opts.candidate_cap)?;
    let mut bs_l = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for l in 1..=sens.s.max(1).min(f.n()) {
        let w = whole_table_search(f, l, opts.candidate_cap)?;
        bs_l.insert(l, w.value);
        witnesses.insert(l, w);
    }
    Ok(MeasureReport {
        n: f.n(),
        s: sens.s,
        s0: sens.s0,
        s1: sens.s1,
        bs: bs.value,
        bs_l,
        block_size_cap: cap,
        sensitivity_witness: sens,
        bs_witness: bs,
        bs_l_witnesses: witnesses,
    })
}

impl MeasureReport {
    /// Re-evaluates every witness against `f`.
    pub fn replays(&self, f: &TruthTable) -> bool {
        let w = &self.sensitivity_witness;
        let point = |x: Option<u64>, value: u32, out: bool| match x {
            Some(x) => f.get(x) == out && sensitivity_at(f, x) == value,
            None => value == 0 && f.is_constant(),
        };
        f.n() == self.n
            && sensitivity_at(f, w.witness) == self.s
            && point(w.witness0, self.s0, false)
            && point(w.witness1, self.s1, true)
            && self.bs_witness.value == self.bs
            && self.bs_witness.replays(f, Some(self.block_size_cap))
            && self
                .bs_l_witnesses
                .iter()
                .all(|(&l, b)| self.bs_l.get(&l) == Some(&b.value) && b.replays(f, Some(l)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and2() -> TruthTable {
        TruthTable::from_u64(2, 0x8).unwrap()
    }

    fn parity(n: u32) -> TruthTable {
        TruthTable::from_fn(n, |x| x.count_ones() % 2 == 1).unwrap()
    }

    #[test]
    fn gosper_enumeration() {
        let v: Vec<u64> = masks_of_size(4, 2).collect();
        assert_eq!(v, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_of_size(64, 64).count(), 1);
        assert_eq!(masks_of_size(3, 4).count(), 0);
    }

    #[test]
    fn and2_measures() {
        let f = and2();
        assert_eq!(sensitivity_at(&f, 3), 2);
        assert_eq!(sensitive_blocks_at(&f, 0, 2), vec![Block(0b11)]);
        let s = sensitivity(&f);
        assert_eq!((s.s, s.s0, s.s1), (2, 1, 2));
        assert_eq!(s.witness, 3);
    }

    #[test]
    fn parity_measures() {
        for n in 1..=6 {
            let f = parity(n);
            let s = sensitivity(&f);
            assert_eq!((s.s, s.s0, s.s1), (n, n, n));
            assert_eq!(block_sensitivity(&f).unwrap().value, n as usize);
        }
        // {1,2} is not sensitive for 2-bit parity; an odd block is.
        assert!(matches!(is_minimal_block(&parity(2), 0, Block(0b11)), Err(Error::NotSensitive { .. })));
        assert!(!is_minimal_block(&parity(3), 0, Block(0b111)).unwrap());
    }

    #[test]
    fn constant_functions() {
        let f = TruthTable::zero(3).unwrap();
        let s = sensitivity(&f);
        assert_eq!((s.s, s.s0, s.s1, s.witness1), (0, 0, 0, None));
        assert!(sensitive_blocks_at(&f, 5, 3).is_empty());
        let bs = block_sensitivity(&f).unwrap();
        assert_eq!((bs.value, bs.input), (0, 0));
        assert_eq!(block_sensitivity_at(&f, 4, 3).unwrap().value, 0);
        let r = measure(&f, BlockOptions::default()).unwrap();
        assert!(r.replays(&f));
        assert_eq!(r.bs_l.get(&1), Some(&0));
    }

    #[test]
    fn minimality_errors() {
        let f = and2();
        assert!(matches!(is_minimal_block(&f, 0, Block(0b01)), Err(Error::NotSensitive { .. })));
        assert!(matches!(is_minimal_block(&f, 0, Block(0)), Err(Error::BlockOutOfRange { .. })));
        assert!(is_minimal_block(&f, 0, Block(0b11)).unwrap());
        assert!(is_minimal_block(&f, 3, Block(0b01)).unwrap());
    }

    #[test]
    fn candidate_cap_is_enforced() {
        let f = parity(6);
        let err = block_sensitivity_at_with(&f, 0, 1, 3, None).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn l_out_of_range() {
        assert!(l_block_sensitivity(&and2(), 0).is_err());
        assert!(l_block_sensitivity(&and2(), 3).is_err());
    }
}
