//! Searches over small Boolean functions for large `bs` relative to `s`.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{block_sensitivity, measure, sensitivity, Block, BlockOptions, BlockSensitivity, TruthTable};
use crate::bounds::kk_check_measured;
use crate::{Error, Result};

/// Largest `n` for [`exhaustive_scan`].
pub const MAX_EXHAUSTIVE_VARS: u32 = 4;
/// Largest `n` for [`random_scan`].
pub const MAX_RANDOM_VARS: u32 = 12;

/// One function with its `s`, `bs` and the witness for `bs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationRecord {
    pub n: u32,
    pub table: String,
    pub fingerprint: String,
    pub s: u32,
    pub bs: usize,
    /// `bs / s^2`, 0 when `s = 0`.
    pub ratio: f64,
    pub witness_input: u64,
    pub family: Vec<Block>,
}

impl SeparationRecord {
    pub fn new(f: &TruthTable, s: u32, bs: &BlockSensitivity) -> Self {
        SeparationRecord {
            n: f.n(),
            table: f.to_hex(),
            fingerprint: f.fingerprint(),
            s,
            bs: bs.value,
            ratio: if s == 0 { 0.0 } else { bs.value as f64 / (s as f64 * s as f64) },
            witness_input: bs.input,
            family: bs.family.clone(),
        }
    }

    fn from_table(f: &TruthTable) -> Result<Self> {
        Ok(Self::new(f, sensitivity(f).s, &block_sensitivity(f)?))
    }

    pub fn function(&self) -> Result<TruthTable> {
        TruthTable::from_hex(self.n, &self.table)
    }

    /// Recomputes `s` and `bs` from the stored table and re-checks the
    /// witness family.
    pub fn replays(&self) -> bool {
        let Ok(f) = self.function() else { return false };
        let Ok(bs) = block_sensitivity(&f) else { return false };
        let witness = BlockSensitivity { value: self.bs, input: self.witness_input, family: self.family.clone() };
        f.fingerprint() == self.fingerprint
            && sensitivity(&f).s == self.s
            && bs.value == self.bs
            && witness.replays(&f, Some(self.s))
    }

    /// The standing tripwire `bs < e^(s+1) sqrt(s / 2 pi)`, vacuous at `s = 0`.
    pub fn within_growth_bound(&self) -> bool {
        self.s == 0 || (self.bs as f64) < growth_bound(self.s)
    }

    /// One line of JSON, fields in declaration order.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

fn growth_bound(s: u32) -> f64 {
    let s = s as f64;
    (s + 1.0).exp() * (s / (2.0 * std::f64::consts::PI)).sqrt()
}

/// Result of enumerating every function on `n` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveScan {
    pub n: u32,
    pub functions: u64,
    /// Largest `bs` for each `s`, smallest table integer on ties.
    pub maxima: Vec<SeparationRecord>,
    /// Tables (as integers) failing some `bs_l <= c_l s^l`.
    pub kk_counterexamples: Vec<u64>,
    /// Tables with `bs_1 != s`.
    pub bs1_mismatches: Vec<u64>,
    /// Tables with `bs_s != bs` (for `s >= 1`).
    pub bss_mismatches: Vec<u64>,
    /// Tables breaking `bs < e^(s+1) sqrt(s/2pi)`.
    pub growth_violations: Vec<u64>,
}

impl ExhaustiveScan {
    pub fn max_bs(&self, s: u32) -> Option<usize> {
        self.maxima.iter().find(|r| r.s == s).map(|r| r.bs)
    }

    pub fn clean(&self) -> bool {
        self.kk_counterexamples.is_empty()
            && self.bs1_mismatches.is_empty()
            && self.bss_mismatches.is_empty()
            && self.growth_violations.is_empty()
    }
}

#[derive(Default)]
struct Sweep {
    /// s -> (bs, table)
    best: BTreeMap<u32, (usize, u64)>,
    kk: Vec<u64>,
    bs1: Vec<u64>,
    bss: Vec<u64>,
    growth: Vec<u64>,
}

impl Sweep {
    fn offer(&mut self, s: u32, bs: usize, t: u64) {
        let e = self.best.entry(s).or_insert((bs, t));
        if bs > e.0 || (bs == e.0 && t < e.1) {
            *e = (bs, t);
        }
    }

    fn merge(mut self, other: Sweep) -> Sweep {
        for (s, (bs, t)) in other.best {
            self.offer(s, bs, t);
        }
        self.kk.extend(other.kk);
        self.bs1.extend(other.bs1);
        self.bss.extend(other.bss);
        self.growth.extend(other.growth);
        self
    }
}

/// Every function on `n <= 4` variables: per-`s` maxima of `bs`, plus the
/// `bs_l <= c_l s^l`, `bs_1 = s`, `bs_s = bs` and growth checks.
pub fn exhaustive_scan(n: u32) -> Result<ExhaustiveScan> {
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::resource("exhaustive scan variables", n as u128, MAX_EXHAUSTIVE_VARS as u128));
    }
    let functions = 1u64 << (1u64 << n);
    const CHUNK: u64 = 256;
    let sweep = (0..functions.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| -> Result<Sweep> {
            let mut sw = Sweep::default();
            for t in chunk * CHUNK..((chunk + 1) * CHUNK).min(functions) {
                let f = TruthTable::from_u64(n, t)?;
                let m = measure(&f, BlockOptions::default())?;
                sw.offer(m.s, m.bs, t);
                if !kk_check_measured(&m).holds() {
                    sw.kk.push(t);
                }
                if m.bs_l.get(&1).is_some_and(|&b| b != m.s as usize) {
                    sw.bs1.push(t);
                }
                if m.s >= 1 && m.bs_l.get(&m.s) != Some(&m.bs) {
                    sw.bss.push(t);
                }
                if m.s >= 1 && (m.bs as f64) >= growth_bound(m.s) {
                    sw.growth.push(t);
                }
            }
            Ok(sw)
        })
        .try_reduce(Sweep::default, |a, b| Ok(a.merge(b)))?;
    let mut maxima = Vec::new();
    for (_, &(_, t)) in &sweep.best {
        maxima.push(SeparationRecord::from_table(&TruthTable::from_u64(n, t)?)?);
    }
    let sorted = |mut v: Vec<u64>| {
        v.sort_unstable();
        v
    };
    Ok(ExhaustiveScan {
        n,
        functions,
        maxima,
        kk_counterexamples: sorted(sweep.kk),
        bs1_mismatches: sorted(sweep.bs1),
        bss_mismatches: sorted(sweep.bss),
        growth_violations: sorted(sweep.growth),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomScan {
    pub n: u32,
    pub samples: u64,
    pub seed: u64,
    /// Largest `bs / s^2`, earliest sample on ties.
    pub best: Option<SeparationRecord>,
    /// Largest `bs` for each `s`, earliest sample on ties.
    pub maxima: Vec<SeparationRecord>,
    pub growth_violations: Vec<SeparationRecord>,
}

impl RandomScan {
    /// Every record, best first.
    pub fn records(&self) -> Vec<&SeparationRecord> {
        self.best.iter().chain(&self.maxima).collect()
    }
}

const SAMPLE_CHUNK: u64 = 1024;

/// (sample index, s, bs)
type Sample = (u64, u32, usize);

/// Whether `a` has a larger `bs / s^2` than `b`, the earlier sample
/// winning ties.
fn higher_ratio(a: Sample, b: Sample) -> bool {
    let lhs = a.2 as u64 * (b.1 as u64).pow(2);
    let rhs = b.2 as u64 * (a.1 as u64).pow(2);
    lhs > rhs || (lhs == rhs && a.0 < b.0)
}

#[derive(Default)]
struct RandomSweep {
    best: Option<Sample>,
    /// s -> (bs, index)
    per_s: BTreeMap<u32, (usize, u64)>,
    growth: Vec<u64>,
}

impl RandomSweep {
    fn offer_best(&mut self, x: Sample) {
        if x.1 > 0 && self.best.is_none_or(|b| higher_ratio(x, b)) {
            self.best = Some(x);
        }
    }

    fn offer_per_s(&mut self, s: u32, bs: usize, index: u64) {
        let e = self.per_s.entry(s).or_insert((bs, index));
        if bs > e.0 || (bs == e.0 && index < e.1) {
            *e = (bs, index);
        }
    }

    fn offer(&mut self, x: Sample) {
        self.offer_best(x);
        self.offer_per_s(x.1, x.2, x.0);
        if x.1 >= 1 && (x.2 as f64) >= growth_bound(x.1) {
            self.growth.push(x.0);
        }
    }

    fn merge(mut self, o: RandomSweep) -> RandomSweep {
        if let Some(b) = o.best {
            self.offer_best(b);
        }
        for (s, (bs, i)) in o.per_s {
            self.offer_per_s(s, bs, i);
        }
        self.growth.extend(o.growth);
        self
    }
}

/// Table number `index` of a seeded scan: sample chunk `j` is drawn from
/// ChaCha8 stream `j`, so results do not depend on the thread count.
fn sample_tables(n: u32, seed: u64, chunk: u64, samples: u64) -> impl Iterator<Item = (u64, TruthTable)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let words = (1usize << n).div_ceil(64);
    let bits = 1u64 << n;
    (chunk * SAMPLE_CHUNK..((chunk + 1) * SAMPLE_CHUNK).min(samples)).map(move |index| {
        let mut w: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        if bits < 64 {
            w[0] &= (1u64 << bits) - 1;
        }
        (index, TruthTable::from_words(n, w).expect("sized to n"))
    })
}

/// `samples` uniformly random functions on `n <= 12` variables.
pub fn random_scan(n: u32, samples: u64, seed: u64) -> Result<RandomScan> {
    if n > MAX_RANDOM_VARS {
        return Err(Error::resource("random scan variables", n as u128, MAX_RANDOM_VARS as u128));
    }
    let sweep = (0..samples.div_ceil(SAMPLE_CHUNK))
        .into_par_iter()
        .map(|chunk| -> Result<RandomSweep> {
            let mut sw = RandomSweep::default();
            for (index, table) in sample_tables(n, seed, chunk, samples) {
                let s = sensitivity(&table).s;
                let bs = block_sensitivity(&table)?.value;
                sw.offer((index, s, bs));
            }
            Ok(sw)
        })
        .try_reduce(RandomSweep::default, |a, b| Ok(a.merge(b)))?;
    let table_at = |index: u64| -> Result<SeparationRecord> {
        let (_, t) = sample_tables(n, seed, index / SAMPLE_CHUNK, samples)
            .find(|(i, _)| *i == index)
            .expect("index was sampled");
        SeparationRecord::from_table(&t)
    };
    let best = sweep.best.map(|(i, _, _)| table_at(i)).transpose()?;
    let maxima = sweep.per_s.values().map(|&(_, i)| table_at(i)).collect::<Result<Vec<_>>>()?;
    let mut growth = sweep.growth;
    growth.sort_unstable();
    let growth_violations = growth.into_iter().map(table_at).collect::<Result<Vec<_>>>()?;
    Ok(RandomScan { n, samples, seed, best, maxima, growth_violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let scan = exhaustive_scan(1).unwrap();
        assert_eq!(scan.functions, 4);
        assert_eq!(scan.max_bs(1), Some(1));
        assert_eq!(scan.max_bs(0), Some(0));
        assert!(scan.clean());
    }

    #[test]
    fn two_variables_bs_equals_s() {
        for t in 0..16 {
            let f = TruthTable::from_u64(2, t).unwrap();
            assert_eq!(block_sensitivity(&f).unwrap().value, sensitivity(&f).s as usize, "table {t}");
        }
        let scan = exhaustive_scan(2).unwrap();
        assert!(scan.maxima.iter().all(|r| r.bs == r.s as usize && r.replays()));
    }

    #[test]
    fn limits() {
        assert!(exhaustive_scan(5).is_err());
        assert!(random_scan(13, 1, 0).is_err());
        let empty = random_scan(4, 0, 0).unwrap();
        assert!(empty.best.is_none() && empty.maxima.is_empty());
    }

    #[test]
    fn random_matches_exhaustive_on_three_variables() {
        let exhaustive = exhaustive_scan(3).unwrap();
        let random = random_scan(3, 20_000, 5).unwrap();
        for r in &random.maxima {
            assert_eq!(Some(r.bs), exhaustive.max_bs(r.s), "s = {}", r.s);
            assert!(r.replays());
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| (exhaustive_scan(3).unwrap(), random_scan(5, 3000, 9).unwrap()))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn record_line_is_stable() {
        let f = crate::constructions::sorted_function();
        let rec = SeparationRecord::from_table(&f).unwrap();
        assert!(rec.replays());
        let line = rec.to_json_line();
        assert!(line.starts_with(r#"{"n":4,"table":"D18B","fingerprint":"#), "{line}");
        let back: SeparationRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rec);
    }
}
