//! Brute-force oracles shared by the integration tests. None of them use the
//! library's kernels, packers or scanners.

#![allow(dead_code)]

use sensitivity_core::boolfn::TruthTable;

/// The fifteen slices for `n = 3`, one row per slice, written group by group.
pub const TABLE_ONE: [[&str; 3]; 15] = [
    ["300**", "*****", "*****"],
    ["*300*", "*****", "*****"],
    ["**300", "*****", "*****"],
    ["0**30", "*****", "*****"],
    ["00**3", "*****", "*****"],
    ["*****", "300**", "*****"],
    ["*****", "*300*", "*****"],
    ["*****", "**300", "*****"],
    ["*****", "0**30", "*****"],
    ["*****", "00**3", "*****"],
    ["*****", "*****", "300**"],
    ["*****", "*****", "*300*"],
    ["*****", "*****", "**300"],
    ["*****", "*****", "0**30"],
    ["*****", "*****", "00**3"],
];

/// `s(f, x)` by flipping each bit of `x`.
pub fn naive_sensitivity_at(f: &TruthTable, x: u64) -> u32 {
    (0..f.n()).filter(|&i| f.get(x ^ (1 << i)) != f.get(x)).count() as u32
}

/// `(s0, s1)` over the whole table.
pub fn naive_sensitivity(f: &TruthTable) -> (u32, u32) {
    let mut s = [0u32; 2];
    for x in 0..1u64 << f.n() {
        let v = usize::from(f.get(x));
        s[v] = s[v].max(naive_sensitivity_at(f, x));
    }
    (s[0], s[1])
}

/// Largest number of disjoint sensitive blocks of size `<= l` at `x`, by a
/// subset DP: the lowest free variable is either unused or lies in one block.
pub fn naive_bs_at(f: &TruthTable, x: u64, l: u32) -> usize {
    let n = f.n();
    let full = (1u64 << n) - 1;
    let fx = f.get(x);
    let sensitive: Vec<bool> =
        (0..=full).map(|b| b != 0 && b.count_ones() <= l && f.get(x ^ b) != fx).collect();
    let mut best = vec![0usize; 1 << n];
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut v = best[(mask & !low) as usize];
        // Submasks of `mask` that contain `low`.
        let rest = mask & !low;
        let mut sub = rest;
        loop {
            let b = sub | low;
            if sensitive[b as usize] {
                v = v.max(1 + best[(mask & !b) as usize]);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[mask as usize] = v;
    }
    best[full as usize]
}

pub fn naive_bs_l(f: &TruthTable, l: u32) -> usize {
    (0..1u64 << f.n()).map(|x| naive_bs_at(f, x, l)).max().unwrap_or(0)
}

pub fn naive_bs(f: &TruthTable) -> usize {
    naive_bs_l(f, f.n())
}

/// Exact Kenyon-Kutin constant `(l/(l-1))^(l-1) / (l-1)!` as a reduced
/// fraction, with `c_1 = 1`.
pub fn kk_fraction(l: u32) -> (u128, u128) {
    if l == 1 {
        return (1, 1);
    }
    let m = u128::from(l - 1);
    let num = u128::from(l).pow(l - 1);
    let den = m.pow(l - 1) * (1..=m).product::<u128>();
    let g = gcd(num, den);
    (num / g, den / g)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Colors of `p` and its `2d` neighbors for any color function; returns
/// `(own, point sensitivity, axis sensitivity)`.
pub fn naive_probe(color: impl Fn(&[i64]) -> bool, p: &[i64]) -> (bool, usize, usize) {
    let own = color(p);
    let mut q = p.to_vec();
    let (mut point, mut axes) = (0, 0);
    for i in 0..p.len() {
        let mut hit = false;
        for delta in [-1, 1] {
            q[i] = p[i] + delta;
            if color(&q) != own {
                point += 1;
                hit = true;
            }
        }
        q[i] = p[i];
        axes += usize::from(hit);
    }
    (own, point, axes)
}

/// Blue membership for the slice coloring with `n` groups, written directly
/// from its definition: some `a, b` with `x_{a,b} = 3` and
/// `x_{a,b+1} = ... = x_{a,b+n-1} = 0` (indices mod `2n - 1`).
pub fn slice_blue(n: usize, p: &[i64]) -> bool {
    let w = 2 * n - 1;
    (0..n).any(|a| {
        let g = &p[a * w..(a + 1) * w];
        (0..w).any(|b| g[b] == 3 && (1..n).all(|t| g[(b + t) % w] == 0))
    })
}
