//! Maximum disjoint subfamily of bitmask blocks (set packing).
//!
//! Depth-first branch and bound over the blocks in the given order, trying
//! inclusion before exclusion. The bound at a node is
//! `depth + min(candidates, |union of candidates| / smallest candidate)`.
//! Preorder visits families in lexicographic order of their index
//! sequences, so the first maximum family found is the lexicographically
//! smallest one.

struct Packer<'a> {
    blocks: &'a [u64],
    best: usize,
    best_family: Option<Vec<usize>>,
    chosen: Vec<usize>,
}

impl Packer<'_> {
    fn search(&mut self, start: usize, used: u64) {
        let depth = self.chosen.len();
        if depth > self.best {
            self.best = depth;
            self.best_family = Some(self.chosen.clone());
        }
        let cands: Vec<usize> = (start..self.blocks.len())
            .filter(|&i| self.blocks[i] & used == 0)
            .collect();
        if cands.is_empty() {
            return;
        }
        // Suffix union and suffix minimum block size over the candidates.
        let mut suffix = vec![(0u64, u32::MAX); cands.len() + 1];
        for k in (0..cands.len()).rev() {
            let b = self.blocks[cands[k]];
            let (u, m) = suffix[k + 1];
            suffix[k] = (u | b, m.min(b.count_ones()));
        }
        for (k, &i) in cands.iter().enumerate() {
            let (union, min_size) = suffix[k];
            let by_elements = (union.count_ones() / min_size.max(1)) as usize;
            let ub = depth + (cands.len() - k).min(by_elements);
            if ub <= self.best {
                break;
            }
            self.chosen.push(i);
            self.search(i + 1, used | self.blocks[i]);
            self.chosen.pop();
        }
    }
}

/// Lexicographically smallest maximum family of pairwise-disjoint blocks,
/// as indices into `blocks`.
///
/// With `beat = Some(t)` the search only looks for families larger than `t`
/// and returns `None` when the maximum is at most `t`.
pub fn max_disjoint_family(blocks: &[u64], beat: Option<usize>) -> Option<Vec<usize>> {
    let mut packer = Packer {
        blocks,
        best: beat.unwrap_or(0),
        best_family: None,
        chosen: Vec::new(),
    };
    if beat.is_none() {
        packer.best_family = Some(Vec::new());
    }
    packer.search(0, 0);
    packer.best_family
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(blocks: &[u64]) -> usize {
        let m = blocks.len();
        (0u32..1 << m)
            .filter(|sel| {
                let mut used = 0u64;
                (0..m).filter(|i| sel >> i & 1 == 1).all(|i| {
                    let ok = used & blocks[i] == 0;
                    used |= blocks[i];
                    ok
                })
            })
            .map(|sel| sel.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(max_disjoint_family(&[], None), Some(vec![]));
        assert_eq!(max_disjoint_family(&[0b11, 0b110, 0b1100], None), Some(vec![0, 2]));
        assert_eq!(max_disjoint_family(&[0b11, 0b110, 0b1100], Some(2)), None);
        assert_eq!(max_disjoint_family(&[0b1, 0b10, 0b11], Some(1)), Some(vec![0, 1]));
    }

    #[test]
    fn matches_brute_force() {
        let mut state = 0x1234_5678_9abc_def0u64;
        for _ in 0..300 {
            let m = (state % 11) as usize + 1;
            let blocks: Vec<u64> = (0..m)
                .map(|_| {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state & 0xfff) | 1 << (state >> 60)
                })
                .collect();
            let fam = max_disjoint_family(&blocks, None).unwrap();
            assert_eq!(fam.len(), brute(&blocks));
            let mut used = 0;
            for &i in &fam {
                assert_eq!(used & blocks[i], 0);
                used |= blocks[i];
            }
        }
    }
}
