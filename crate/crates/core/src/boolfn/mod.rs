//! Boolean functions as packed truth tables and sensitivity-type measures.
//!
//! Input `x = (x_1, ..., x_n)` is encoded as the integer
//! `x_1 + 2 x_2 + ... + 2^(n-1) x_n`, so variable `i` (1-based) is bit
//! `i - 1` of the index. A [`Block`] is a mask over the same bits.

mod kernel;
mod measures;
mod packing;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hexbits;
use crate::{Error, Result};

pub use kernel::sensitivity_bitmap;
pub use measures::{
    block_sensitivity, block_sensitivity_at, block_sensitivity_at_with, block_sensitivity_with,
    is_minimal_block, l_block_sensitivity, measure, minimal_blocks_at, sensitive_blocks_at,
    sensitivity, sensitivity_at, BlockOptions, BlockSensitivity, MeasureReport, Sensitivity,
    DEFAULT_CANDIDATE_CAP,
};
pub use packing::max_disjoint_family;

/// Largest variable count stored as an explicit table (2^24 bits = 2 MiB).
pub const MAX_VARS: u32 = 24;

/// Anything that can be evaluated on an `n`-bit input index.
pub trait BooleanFunction: Sync {
    fn num_vars(&self) -> u32;

    /// Output on `x`. Callers guarantee `x < 2^n`.
    fn value(&self, x: u64) -> bool;

    fn eval(&self, x: u64) -> Result<bool> {
        let n = self.num_vars();
        if n < 64 && x >> n != 0 {
            return Err(Error::InputOutOfRange { index: x, n });
        }
        Ok(self.value(x))
    }
}

/// A set of variables; bit `i - 1` set means variable `i` is in the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Block(pub u64);

impl Block {
    pub fn from_vars(vars: &[u32]) -> Self {
        Block(vars.iter().fold(0, |m, &v| m | 1u64 << (v - 1)))
    }

    /// 1-based variable indices in ascending order.
    pub fn vars(self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len());
        let mut m = self.0;
        while m != 0 {
            out.push(m.trailing_zeros() + 1);
            m &= m - 1;
        }
        out
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: Block) -> bool {
        self.0 & other.0 == 0
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = self.vars().iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", vars.join(","))
    }
}

/// Parse an input written as a bit string `x_1 x_2 ... x_n`, left to right.
pub fn parse_input_bits(bits: &str) -> Result<u64> {
    if bits.is_empty() || bits.len() > 64 {
        return Err(Error::Parse(format!("bad input bit string {bits:?}")));
    }
    bits.chars().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(Error::Parse(format!("bad input bit string {bits:?}"))),
    })
}

/// Inverse of [`parse_input_bits`].
pub fn format_input_bits(x: u64, n: u32) -> String {
    (0..n).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Within-word masks selecting positions whose bit `i` is zero, `i < 6`.
pub(crate) const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Packed table of `2^n` output bits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u32,
    words: Vec<u64>,
}

impl TruthTable {
    fn check_n(n: u32) -> Result<()> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::VariableCount { n, max: MAX_VARS });
        }
        Ok(())
    }

    fn word_count(n: u32) -> usize {
        (1usize << n).div_ceil(64)
    }

    fn tail_mask(n: u32) -> u64 {
        if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << n)) - 1
        }
    }

    pub fn zero(n: u32) -> Result<Self> {
        Self::check_n(n)?;
        Ok(TruthTable { n, words: vec![0; Self::word_count(n)] })
    }

    /// Table of `f` evaluated on every input, filled in parallel by word.
    pub fn from_fn<F>(n: u32, f: F) -> Result<Self>
    where
        F: Fn(u64) -> bool + Sync,
    {
        Self::check_n(n)?;
        let len = 1u64 << n;
        let words = (0..Self::word_count(n))
            .into_par_iter()
            .with_min_len(64)
            .map(|w| {
                let base = (w as u64) * 64;
                let mut word = 0u64;
                for j in 0..64u64.min(len - base) {
                    if f(base + j) {
                        word |= 1 << j;
                    }
                }
                word
            })
            .collect();
        Ok(TruthTable { n, words })
    }

    pub fn from_function<F: BooleanFunction + ?Sized>(f: &F) -> Result<Self> {
        Self::from_fn(f.num_vars(), |x| f.value(x))
    }

    pub fn from_words(n: u32, words: Vec<u64>) -> Result<Self> {
        Self::check_n(n)?;
        if words.len() != Self::word_count(n) {
            return Err(Error::Parse(format!(
                "expected {} words for n={n}, got {}",
                Self::word_count(n),
                words.len()
            )));
        }
        if words[0] & !Self::tail_mask(n) != 0 {
            return Err(Error::Parse(format!("bits set beyond 2^{n} entries")));
        }
        Ok(TruthTable { n, words })
    }

    /// Table for `n <= 6` from the integer whose bit `j` is the output on `j`.
    pub fn from_u64(n: u32, value: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::VariableCount { n, max: 6 });
        }
        Self::from_words(n, vec![value])
    }

    pub fn from_hex(n: u32, hex: &str) -> Result<Self> {
        Self::check_n(n)?;
        let words = hexbits::decode_words(hex, 1usize << n)?;
        Self::from_words(n, words)
    }

    pub fn to_hex(&self) -> String {
        hexbits::encode_words(&self.words, 1usize << self.n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, x: u64) -> bool {
        debug_assert!(x >> self.n == 0);
        self.words[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.len() as u64
    }

    /// Table of `x -> f(x xor e_i)` for 0-based variable `i`.
    pub(crate) fn flipped_words(&self, i: u32) -> Vec<u64> {
        if i < 6 {
            let shift = 1u32 << i;
            let low = LOW_HALF[i as usize];
            self.words
                .iter()
                .map(|&w| ((w & low) << shift) | ((w >> shift) & low))
                .collect()
        } else {
            let stride = 1usize << (i - 6);
            (0..self.words.len()).map(|j| self.words[j ^ stride]).collect()
        }
    }

    /// `g(x) = f(x xor mask)`.
    pub fn complement_inputs(&self, mask: u64) -> Result<Self> {
        if mask >> self.n != 0 {
            return Err(Error::BlockOutOfRange { mask, n: self.n });
        }
        let mut out = self.clone();
        for i in 0..self.n {
            if mask >> i & 1 == 1 {
                out.words = out.flipped_words(i);
            }
        }
        Ok(out)
    }

    /// Output complement `g(x) = !f(x)`.
    pub fn negate(&self) -> Self {
        let tail = Self::tail_mask(self.n);
        let words = self.words.iter().map(|w| !w & tail).collect();
        TruthTable { n: self.n, words }
    }

    /// Rename variables: variable `i` of `self` becomes variable `perm[i]` of
    /// the result (both 0-based).
    pub fn permute_variables(&self, perm: &[u32]) -> Result<Self> {
        let n = self.n;
        let mut seen = 0u64;
        for &p in perm {
            if p >= n || seen >> p & 1 == 1 {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{n}")));
            }
            seen |= 1 << p;
        }
        if perm.len() != n as usize {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        TruthTable::from_fn(n, |y| {
            let x = (0..n).fold(0u64, |x, i| x | (y >> perm[i as usize] & 1) << i);
            self.get(x)
        })
    }

    pub fn fingerprint(&self) -> String {
        crate::fingerprint(self.to_string().as_bytes())
    }
}

impl BooleanFunction for TruthTable {
    fn num_vars(&self) -> u32 {
        self.n
    }

    #[inline]
    fn value(&self, x: u64) -> bool {
        self.get(x)
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n, self.to_hex())
    }
}

/// Text format: a header line `n=<k>` followed by the hex table.
impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        writeln!(f, "{}", self.to_hex())
    }
}

impl FromStr for TruthTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty truth table".into()))?;
        let n = header
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}, expected n=<k>")))?;
        // Long tables may be wrapped over several lines.
        let hex: String = lines.collect();
        TruthTable::from_hex(n, &hex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn and2_text_format() {
        let t: TruthTable = "n=2\n8\n".parse().unwrap();
        assert_eq!(t.eval(3).unwrap(), true);
        assert_eq!(t.eval(2).unwrap(), false);
        assert_eq!(t.to_string(), "n=2\n8\n");
        assert!(matches!(t.eval(4), Err(Error::InputOutOfRange { .. })));
    }

    #[test]
    fn rejects_bad_headers_and_sizes() {
        assert!("2\n8".parse::<TruthTable>().is_err());
        assert!("n=2\n18".parse::<TruthTable>().is_err());
        assert!("n=0\n0".parse::<TruthTable>().is_err());
        assert!("n=25\n0".parse::<TruthTable>().is_err());
    }

    #[test]
    fn flipped_words_match_pointwise() {
        let t = TruthTable::from_fn(9, |x| (x * 2654435761) >> 7 & 1 == 1).unwrap();
        for i in 0..9 {
            let flipped = TruthTable { n: 9, words: t.flipped_words(i) };
            for x in 0..512u64 {
                assert_eq!(flipped.get(x), t.get(x ^ 1 << i));
            }
        }
    }

    #[test]
    fn complement_and2() {
        let and2 = TruthTable::from_u64(2, 0x8).unwrap();
        assert_eq!(and2.complement_inputs(0).unwrap(), and2);
        let g = and2.complement_inputs(0b11).unwrap();
        assert_eq!(g.to_hex(), "1");
        assert!(and2.complement_inputs(0b100).is_err());
    }

    #[test]
    fn input_bit_strings() {
        assert_eq!(parse_input_bits("0100").unwrap(), 2);
        assert_eq!(format_input_bits(2, 4), "0100");
        assert!(parse_input_bits("01x").is_err());
    }

    #[test]
    fn block_display() {
        assert_eq!(Block::from_vars(&[3, 4]).to_string(), "{3,4}");
        assert_eq!(Block::from_vars(&[3, 4]).0, 0b1100);
    }
}
