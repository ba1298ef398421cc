//! Explicit functions and colorings: the sorted-input function, Rubinstein's
//! function and the slice coloring with `d = 2r^2 - r`.

use crate::boolfn::{parse_input_bits, BooleanFunction, TruthTable, MAX_VARS};
use crate::lattice::{Slice, SlicedColoring};
use crate::{Error, Result};

/// The eight accepted inputs of the sorted-input function, written `x_1..x_4`.
pub const SORTED_ACCEPTS: [&str; 8] = ["0000", "0001", "0011", "0111", "1000", "1100", "1110", "1111"];

/// 4-variable function that is 1 exactly on [`SORTED_ACCEPTS`].
pub fn sorted_function() -> TruthTable {
    let value = SORTED_ACCEPTS
        .iter()
        .map(|s| parse_input_bits(s).expect("constant input strings"))
        .fold(0u64, |acc, x| acc | 1 << x);
    TruthTable::from_u64(4, value).expect("n = 4 fits a word")
}

/// `g` on one segment: exactly one adjacent pair `(2j-1, 2j)` of ones.
fn accepts_pair(segment: u64) -> bool {
    segment.count_ones() == 2 && segment.trailing_zeros() % 2 == 0 && segment >> segment.trailing_zeros() == 0b11
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::OddParameter(n));
    }
    Ok(())
}

/// Rubinstein's inner function on `n` variables.
pub fn rubinstein_g(n: usize) -> Result<TruthTable> {
    check_even(n)?;
    TruthTable::from_fn(n as u32, accepts_pair)
}

/// OR of `n` copies of [`rubinstein_g`] over consecutive segments of `n`
/// variables, evaluated on demand. Supports `n^2 <= 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RubinsteinOracle {
    n: usize,
}

impl RubinsteinOracle {
    pub fn new(n: usize) -> Result<Self> {
        check_even(n)?;
        if n * n > 64 {
            return Err(Error::VariableCount { n: (n * n) as u32, max: 64 });
        }
        Ok(RubinsteinOracle { n })
    }

    pub fn segment_len(&self) -> usize {
        self.n
    }
}

impl BooleanFunction for RubinsteinOracle {
    fn num_vars(&self) -> u32 {
        (self.n * self.n) as u32
    }

    fn value(&self, x: u64) -> bool {
        let n = self.n;
        let seg_mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (0..n).any(|i| accepts_pair(x >> (i * n) & seg_mask))
    }
}

/// Rubinstein's function, tabulated when `n^2 <= 24`.
#[derive(Debug, Clone)]
pub enum Rubinstein {
    Table(TruthTable),
    Oracle(RubinsteinOracle),
}

impl Rubinstein {
    pub fn as_table(&self) -> Option<&TruthTable> {
        match self {
            Rubinstein::Table(t) => Some(t),
            Rubinstein::Oracle(_) => None,
        }
    }

    /// Whole-domain measures need the table; the oracle form refuses.
    pub fn require_table(&self) -> Result<&TruthTable> {
        self.as_table().ok_or_else(|| {
            Error::resource("variables for an explicit truth table", self.num_vars() as u128, MAX_VARS as u128)
        })
    }
}

impl BooleanFunction for Rubinstein {
    fn num_vars(&self) -> u32 {
        match self {
            Rubinstein::Table(t) => t.n(),
            Rubinstein::Oracle(o) => o.num_vars(),
        }
    }

    fn value(&self, x: u64) -> bool {
        match self {
            Rubinstein::Table(t) => t.get(x),
            Rubinstein::Oracle(o) => o.value(x),
        }
    }
}

pub fn rubinstein_f(n: usize) -> Result<Rubinstein> {
    let oracle = RubinsteinOracle::new(n)?;
    if oracle.num_vars() <= MAX_VARS {
        Ok(Rubinstein::Table(TruthTable::from_function(&oracle)?))
    } else {
        Ok(Rubinstein::Oracle(oracle))
    }
}

/// The `n (2n - 1)` coordinates `{i, j}`, `1 <= i <= n`, `1 <= j <= 2n - 1`,
/// flattened row-major by group: `{i, j} -> (i - 1)(2n - 1) + (j - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupedCoordinates {
    pub n: usize,
}

impl GroupedCoordinates {
    pub fn width(&self) -> usize {
        2 * self.n - 1
    }

    pub fn dim(&self) -> usize {
        self.n * self.width()
    }

    /// Flat 0-based index of `{i, j}`; `j` is taken modulo `2n - 1` into `1..=2n-1`.
    pub fn flat(&self, i: usize, j: usize) -> usize {
        let w = self.width();
        (i - 1) * w + (j - 1) % w
    }

    /// Inverse of [`flat`](Self::flat).
    pub fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.width() + 1, index % self.width() + 1)
    }
}

fn slice_at(coords: &GroupedCoordinates, a: usize, b: usize) -> Slice {
    Slice {
        axis: coords.flat(a, b),
        c: 3,
        zeros: (1..coords.n).map(|t| coords.flat(a, b + t)).collect(),
    }
}

/// Slice `S_{a,b}`: `x_{a,b} = 3` and `x_{a,b+1} = ... = x_{a,b+n-1} = 0`,
/// for every `a` and `b`, in row-major order.
pub fn slice_coloring(n: usize) -> Result<SlicedColoring> {
    if n == 0 {
        return Err(Error::InvalidArgument("slice coloring needs n >= 1".into()));
    }
    let coords = GroupedCoordinates { n };
    let slices = (1..=n)
        .flat_map(|a| (1..=coords.width()).map(move |b| (a, b)))
        .map(|(a, b)| slice_at(&coords, a, b))
        .collect();
    SlicedColoring::new(coords.dim(), slices)
}

/// The slices `S_{1,j}` on the first coordinate group alone (dimension `2n - 1`).
pub fn slice_group(n: usize) -> Result<SlicedColoring> {
    if n == 0 {
        return Err(Error::InvalidArgument("slice group needs n >= 1".into()));
    }
    let coords = GroupedCoordinates { n };
    let slices = (1..=coords.width()).map(|b| slice_at(&coords, 1, b)).collect();
    SlicedColoring::new(coords.width(), slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{sensitivity, BooleanFunction};

    #[test]
    fn sorted_hex() {
        let f = sorted_function();
        assert_eq!(f.to_hex(), "D18B");
        assert!(f.eval(0).unwrap());
    }

    #[test]
    fn rubinstein_g_small() {
        assert_eq!(rubinstein_g(2).unwrap().to_hex(), "8");
        let g4 = rubinstein_g(4).unwrap();
        let accepted: Vec<u64> = (0..16).filter(|&x| g4.get(x)).collect();
        assert_eq!(accepted, vec![parse_input_bits("1100").unwrap(), parse_input_bits("0011").unwrap()]);
        assert_eq!(sensitivity(&g4).s1, 4);
        assert!(matches!(rubinstein_g(3), Err(Error::OddParameter(3))));
    }

    #[test]
    fn rubinstein_forms() {
        assert!(rubinstein_f(4).unwrap().as_table().is_some());
        let big = rubinstein_f(6).unwrap();
        assert!(big.as_table().is_none());
        assert!(matches!(big.require_table(), Err(Error::ResourceLimit { .. })));
        assert_eq!(big.num_vars(), 36);
        // one adjacent pair in the third segment
        assert!(big.value(0b11 << 12));
        assert!(!big.value(0b110 << 12));
        assert!(matches!(rubinstein_f(5), Err(Error::OddParameter(5))));
    }

    #[test]
    fn grouped_coordinates_wrap() {
        let g = GroupedCoordinates { n: 3 };
        assert_eq!(g.dim(), 15);
        assert_eq!(g.flat(1, 6), g.flat(1, 1));
        assert_eq!(g.flat(2, 1), 5);
        for idx in 0..15 {
            let (i, j) = g.pair(idx);
            assert_eq!(g.flat(i, j), idx);
        }
    }

    #[test]
    fn small_slice_colorings() {
        let one = slice_coloring(1).unwrap();
        assert_eq!(one.d, 1);
        assert_eq!(one.slices, vec![Slice { axis: 0, c: 3, zeros: vec![] }]);
        let two = slice_coloring(2).unwrap();
        assert_eq!(two.d, 6);
        assert_eq!(two.slices[0], Slice { axis: 0, c: 3, zeros: vec![1] });
        assert_eq!(two.slices[2], Slice { axis: 2, c: 3, zeros: vec![0] });
        assert_eq!(slice_group(2).unwrap().slices.len(), 3);
        assert!(slice_coloring(0).is_err());
    }
}
