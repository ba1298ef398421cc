//! Bit-parallel sensitivity counts.
//!
//! For each variable the table is XORed with its copy flipped along that
//! variable; the set bits of the result are exactly the inputs sensitive to
//! it. The per-input counts are accumulated in bit-sliced counters (one
//! 64-bit plane per counter bit), so each word of the table costs `5n`
//! word operations instead of `64n` scalar increments.

use rayon::prelude::*;

use super::TruthTable;

// n <= 24 < 32, so five planes are enough.
const PLANES: usize = 5;

/// `s(f, x)` for every input `x`, indexed by `x`.
pub fn sensitivity_bitmap(f: &TruthTable) -> Vec<u8> {
    let flipped: Vec<Vec<u64>> = (0..f.n()).map(|i| f.flipped_words(i)).collect();
    let len = f.len();
    let mut counts = vec![0u8; len];
    counts
        .par_chunks_mut(64)
        .enumerate()
        .with_min_len(256)
        .for_each(|(w, out)| {
            let word = f.words()[w];
            let mut planes = [0u64; PLANES];
            for flip in &flipped {
                let mut carry = word ^ flip[w];
                for plane in planes.iter_mut() {
                    if carry == 0 {
                        break;
                    }
                    let next = *plane & carry;
                    *plane ^= carry;
                    carry = next;
                }
            }
            for (j, slot) in out.iter_mut().enumerate() {
                *slot = planes
                    .iter()
                    .enumerate()
                    .map(|(p, plane)| ((plane >> j & 1) as u8) << p)
                    .sum();
            }
        });
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::sensitivity_at;

    #[test]
    fn parity_and_constant() {
        for n in 1..=8 {
            let parity = TruthTable::from_fn(n, |x| x.count_ones() % 2 == 1).unwrap();
            assert!(sensitivity_bitmap(&parity).iter().all(|&c| c as u32 == n));
            let zero = TruthTable::zero(n).unwrap();
            assert!(sensitivity_bitmap(&zero).iter().all(|&c| c == 0));
        }
    }

    #[test]
    fn matches_naive_on_a_wide_table() {
        let t = TruthTable::from_fn(13, |x| (x.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 61) & 1 == 1).unwrap();
        let counts = sensitivity_bitmap(&t);
        for x in 0..t.len() as u64 {
            assert_eq!(counts[x as usize] as u32, sensitivity_at(&t, x));
        }
    }
}
