//! Exhaustive, decomposed and sampled scans producing [`ColoringReport`]s.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{probe, Color, ColorOracle, Coloring, MinWidth, MirrorPeriodicColoring, Point, SlicedColoring};
use crate::{Error, Result};

/// Exact scans refuse to make more color queries than this by default.
pub const DEFAULT_PROBE_CAP: u128 = 100_000_000;

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// One full period of a periodic coloring.
    ExactPeriod,
    /// The product of per-axis representative sets.
    ExactRepresentative,
    /// Independent coordinate groups measured separately and combined.
    ExactDecomposed,
    /// A caller-supplied box; values are lower bounds.
    BoxScan,
    /// Random points plus supplied witnesses; values are lower bounds.
    Sampled,
}

impl ScanMode {
    pub fn is_exact(self) -> bool {
        matches!(self, ScanMode::ExactPeriod | ScanMode::ExactRepresentative | ScanMode::ExactDecomposed)
    }
}

/// A maximum with a point attaining it (`None` when no point of the
/// relevant color was seen).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: usize,
    pub witness: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub d: usize,
    pub mode: ScanMode,
    pub points_scanned: u64,
    /// `s(C)`, point sensitivity.
    pub s: Extremum,
    /// `r(C)`, axis sensitivity.
    pub r: Extremum,
    /// Largest point sensitivity of a red point.
    pub s_red: Extremum,
    pub s_blue: Extremum,
    /// `s^R`: largest axis sensitivity of a red point.
    pub sr: Extremum,
    /// `s^B`.
    pub sb: Extremum,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_width: Option<MinWidth>,
}

impl ColoringReport {
    /// Re-probes every witness and checks it reproduces its value and color.
    pub fn replays<C: ColorOracle + ?Sized>(&self, c: &C) -> bool {
        let check = |e: &Extremum, color: Option<Color>, axis: bool| match &e.witness {
            None => e.value == 0,
            Some(p) => {
                p.len() == c.dim() && {
                    let (own, point, axes) = probe(c, p);
                    color.is_none_or(|col| col == own) && e.value == if axis { axes } else { point }
                }
            }
        };
        c.dim() == self.d
            && check(&self.s, None, false)
            && check(&self.r, None, true)
            && check(&self.s_red, Some(Color::Red), false)
            && check(&self.s_blue, Some(Color::Blue), false)
            && check(&self.sr, Some(Color::Red), true)
            && check(&self.sb, Some(Color::Blue), true)
    }

    /// `k`, when the report carries a min-width.
    pub fn k(&self) -> Option<u64> {
        self.min_width.as_ref().map(|m| m.k)
    }
}

#[derive(Clone, Default)]
struct Best {
    value: usize,
    key: u64,
    point: Option<Point>,
}

impl Best {
    fn offer(&mut self, value: usize, key: u64, p: &[i64]) {
        if self.point.is_none() || value > self.value || (value == self.value && key < self.key) {
            *self = Best { value, key, point: Some(p.to_vec()) };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if let Some(p) = &other.point {
            self.offer(other.value, other.key, p);
        }
        self
    }

    fn better(a: &Best, b: &Best) -> Best {
        a.clone().merge(b.clone())
    }

    fn extremum(self) -> Extremum {
        Extremum { value: self.value, witness: self.point }
    }
}

#[derive(Clone, Default)]
struct Acc {
    s_red: Best,
    s_blue: Best,
    sr: Best,
    sb: Best,
    points: u64,
}

impl Acc {
    fn visit<C: ColorOracle + ?Sized>(&mut self, c: &C, key: u64, p: &[i64]) {
        let (own, point, axes) = probe(c, p);
        match own {
            Color::Red => {
                self.s_red.offer(point, key, p);
                self.sr.offer(axes, key, p);
            }
            Color::Blue => {
                self.s_blue.offer(point, key, p);
                self.sb.offer(axes, key, p);
            }
        }
        self.points += 1;
    }

    fn merge(self, o: Acc) -> Acc {
        Acc {
            s_red: self.s_red.merge(o.s_red),
            s_blue: self.s_blue.merge(o.s_blue),
            sr: self.sr.merge(o.sr),
            sb: self.sb.merge(o.sb),
            points: self.points + o.points,
        }
    }

    fn finish(self, d: usize, mode: ScanMode) -> ColoringReport {
        let s = Best::better(&self.s_red, &self.s_blue);
        let r = Best::better(&self.sr, &self.sb);
        ColoringReport {
            d,
            mode,
            points_scanned: self.points,
            s: s.extremum(),
            r: r.extremum(),
            s_red: self.s_red.extremum(),
            s_blue: self.s_blue.extremum(),
            sr: self.sr.extremum(),
            sb: self.sb.extremum(),
            min_width: None,
        }
    }
}

fn point_at(values: &[Vec<i64>], mut index: u64, p: &mut [i64]) {
    for (axis, vals) in values.iter().enumerate().rev() {
        let len = vals.len() as u64;
        p[axis] = vals[(index % len) as usize];
        index /= len;
    }
}

/// Scans the full product of `values` (axis 0 most significant, so ties
/// resolve to the lexicographically smallest point when each list is sorted).
fn scan_product<C: ColorOracle + ?Sized>(c: &C, values: &[Vec<i64>], mode: ScanMode, cap: u128) -> Result<ColoringReport> {
    let d = c.dim();
    if values.len() != d {
        return Err(Error::Dimension { expected: d, got: values.len() });
    }
    let total = values.iter().try_fold(1u128, |acc, v| acc.checked_mul(v.len() as u128));
    let probes = total.and_then(|t| t.checked_mul(2 * d as u128 + 1));
    match probes {
        Some(p) if p <= cap => {}
        _ => return Err(Error::resource("color queries for an exhaustive scan", probes.unwrap_or(u128::MAX), cap)),
    }
    let total = total.unwrap() as u64;
    let acc = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = Acc::default();
            let mut p = vec![0; d];
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                point_at(values, index, &mut p);
                acc.visit(c, index, &p);
            }
            acc
        })
        .reduce(Acc::default, Acc::merge);
    Ok(acc.finish(d, mode))
}

/// Exhaustive scan of the representative product of `c`.
pub fn representative_scan<C: ColorOracle + ?Sized>(c: &C, mode: ScanMode, cap: u128) -> Result<ColoringReport> {
    let reps = c
        .representatives()
        .ok_or_else(|| Error::NoExactMethod("coloring has no representative sets".into()))?;
    let values: Vec<Vec<i64>> = reps.iter().map(|r| r.values()).collect();
    scan_product(c, &values, mode, cap)
}

/// Scan of one full period `prod 2(b_i + 1)`, which is exact by periodicity.
pub fn exact_report_periodic(c: &MirrorPeriodicColoring, cap: u128) -> Result<ColoringReport> {
    representative_scan(c, ScanMode::ExactPeriod, cap)
}

/// Exact report of a sliced coloring: the representative box when it fits
/// under `cap`, otherwise the independent coordinate groups separately.
pub fn exact_report_sliced(c: &SlicedColoring, cap: u128) -> Result<ColoringReport> {
    match representative_scan(c, ScanMode::ExactRepresentative, cap) {
        Err(Error::ResourceLimit { .. }) if decomposes(c) => {
            let parts = c
                .components()
                .into_iter()
                .map(|(coords, sub)| Ok((coords, representative_scan(&sub, ScanMode::ExactRepresentative, cap)?)))
                .collect::<Result<Vec<_>>>()?;
            combine_or_product(c.d, parts)
        }
        other => other,
    }
}

fn decomposes(c: &SlicedColoring) -> bool {
    let comps = c.components();
    comps.len() > 1 || comps.first().is_some_and(|(coords, _)| coords.len() < c.d)
}

/// Exact report for any coloring kind that has an exact method.
pub fn exact_report(c: &Coloring, cap: u128) -> Result<ColoringReport> {
    match c {
        Coloring::Sliced(s) => exact_report_sliced(s, cap),
        Coloring::MirrorPeriodic(m) => exact_report_periodic(m, cap),
        Coloring::Repeated(rep) => match representative_scan(c, ScanMode::ExactRepresentative, cap) {
            Err(Error::ResourceLimit { .. }) if rep.copies > 1 => {
                let inner = exact_report(&rep.inner, cap)?;
                let k = rep.inner.dim();
                let parts = (0..rep.copies).map(|g| ((g * k..(g + 1) * k).collect(), inner.clone())).collect();
                combine_or_product(c.dim(), parts)
            }
            other => other,
        },
        Coloring::Doubled(_) | Coloring::Reflected(_) => representative_scan(c, ScanMode::ExactRepresentative, cap),
    }
}

/// Combines exact reports of colorings on disjoint coordinate groups into
/// the report of the coloring that is blue iff some group is blue.
///
/// A red point is red in every group, and flipping one coordinate changes
/// only its own group, so red sensitivities add up. A blue point with two
/// blue groups stays blue under any single flip; with one blue group `g` its
/// sensitivity is that of `g`. Coordinates outside every group never change
/// the color and are set to 0 in witnesses.
fn combine_or_product(d: usize, parts: Vec<(Vec<usize>, ColoringReport)>) -> Result<ColoringReport> {
    let mut red_base = vec![0i64; d];
    for (coords, rep) in &parts {
        let red = rep
            .sr
            .witness
            .as_ref()
            .ok_or_else(|| Error::NoExactMethod("a coordinate group has no red point".into()))?;
        for (&i, &v) in coords.iter().zip(red) {
            red_base[i] = v;
        }
    }
    let place = |base: &mut Point, coords: &[usize], p: &Option<Point>| {
        if let Some(p) = p {
            for (&i, &v) in coords.iter().zip(p) {
                base[i] = v;
            }
        }
    };
    let sum = |pick: &dyn Fn(&ColoringReport) -> &Extremum| {
        let mut w = red_base.clone();
        let mut total = 0;
        for (coords, rep) in &parts {
            total += pick(rep).value;
            place(&mut w, coords, &pick(rep).witness);
        }
        Extremum { value: total, witness: Some(w) }
    };
    let best_single = |pick: &dyn Fn(&ColoringReport) -> &Extremum| {
        let mut best: Option<(usize, usize)> = None;
        for (g, (_, rep)) in parts.iter().enumerate() {
            let e = pick(rep);
            if e.witness.is_some() && best.is_none_or(|(v, _)| e.value > v) {
                best = Some((e.value, g));
            }
        }
        match best {
            None => Extremum::default(),
            Some((value, g)) => {
                let mut w = red_base.clone();
                place(&mut w, &parts[g].0, &pick(&parts[g].1).witness);
                Extremum { value, witness: Some(w) }
            }
        }
    };
    let sr = sum(&|r| &r.sr);
    let s_red = sum(&|r| &r.s_red);
    let sb = best_single(&|r| &r.sb);
    let s_blue = best_single(&|r| &r.s_blue);
    let pick = |a: &Extremum, b: &Extremum| if b.value > a.value { b.clone() } else { a.clone() };
    Ok(ColoringReport {
        d,
        mode: ScanMode::ExactDecomposed,
        points_scanned: parts.iter().map(|(_, r)| r.points_scanned).sum(),
        s: pick(&s_red, &s_blue),
        r: pick(&sr, &sb),
        s_red,
        s_blue,
        sr,
        sb,
        min_width: None,
    })
}

/// Scan of the box `lo..=hi` on every axis. Values are lower bounds.
pub fn box_report<C: ColorOracle + ?Sized>(c: &C, lo: i64, hi: i64, cap: u128) -> Result<ColoringReport> {
    if lo > hi {
        return Err(Error::InvalidArgument(format!("empty box {lo}:{hi}")));
    }
    let values = vec![(lo..=hi).collect::<Vec<_>>(); c.dim()];
    scan_product(c, &values, ScanMode::BoxScan, cap)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleRegion {
    /// Uniform over the representative product.
    Representative,
    /// Uniform over `lo..=hi` on every axis.
    Box { lo: i64, hi: i64 },
}

/// Maximum sensitivities over `witnesses` and `samples` uniformly random
/// points of `region`. Values are lower bounds on the true maxima.
///
/// Sampling uses ChaCha8 seeded with `seed`; samples are drawn in blocks of
/// 4096, block `j` from stream `j`, so the result does not depend on the
/// number of worker threads.
pub fn sampled_report<C: ColorOracle + ?Sized>(
    c: &C,
    region: &SampleRegion,
    samples: u64,
    seed: u64,
    witnesses: &[Point],
) -> Result<ColoringReport> {
    let d = c.dim();
    let axes: Vec<Vec<i64>> = match region {
        SampleRegion::Representative => c
            .representatives()
            .ok_or_else(|| Error::NoExactMethod("coloring has no representative sets".into()))?
            .iter()
            .map(|r| r.values())
            .collect(),
        SampleRegion::Box { lo, hi } if lo <= hi => Vec::new(),
        SampleRegion::Box { lo, hi } => return Err(Error::InvalidArgument(format!("empty box {lo}:{hi}"))),
    };
    let mut acc = Acc::default();
    for (i, w) in witnesses.iter().enumerate() {
        if w.len() != d {
            return Err(Error::Dimension { expected: d, got: w.len() });
        }
        acc.visit(c, i as u64, w);
    }
    let offset = witnesses.len() as u64;
    let sampled = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let mut acc = Acc::default();
            let mut p = vec![0; d];
            for j in chunk * CHUNK..((chunk + 1) * CHUNK).min(samples) {
                match region {
                    SampleRegion::Representative => {
                        for (slot, vals) in p.iter_mut().zip(&axes) {
                            *slot = vals[rng.random_range(0..vals.len())];
                        }
                    }
                    SampleRegion::Box { lo, hi } => {
                        for slot in p.iter_mut() {
                            *slot = rng.random_range(*lo..=*hi);
                        }
                    }
                }
                acc.visit(c, offset + j, &p);
            }
            acc
        })
        .reduce(Acc::default, Acc::merge);
    Ok(acc.merge(sampled).finish(d, ScanMode::Sampled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::testing::{Checkerboard, Uniform};
    use crate::lattice::Slice;

    #[test]
    fn one_dimensional_period() {
        let c = MirrorPeriodicColoring::new(vec![1], vec![false, true]).unwrap();
        let r = exact_report_periodic(&c, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!((r.s.value, r.r.value), (1, 1));
        assert_eq!(r.points_scanned, 4);
        assert_eq!(r.mode, ScanMode::ExactPeriod);
        assert!(r.replays(&c));
    }

    #[test]
    fn all_red_box_is_zero() {
        let c = MirrorPeriodicColoring::new(vec![2, 1], vec![false; 6]).unwrap();
        let r = exact_report_periodic(&c, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!(r.s.value, 0);
        assert_eq!(r.sb, Extremum::default());
    }

    #[test]
    fn empty_slice_list_is_all_red() {
        let c = SlicedColoring::new(3, vec![]).unwrap();
        let r = exact_report_sliced(&c, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!((r.r.value, r.s.value), (0, 0));
    }

    #[test]
    fn single_slice_blue_sensitivity() {
        let c = SlicedColoring::new(2, vec![Slice { axis: 0, c: 3, zeros: vec![1] }]).unwrap();
        let r = exact_report_sliced(&c, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!(r.sb.value, 2);
        assert!(r.replays(&c));
    }

    #[test]
    fn checkerboard_exact() {
        let r = representative_scan(&Checkerboard(2), ScanMode::ExactPeriod, DEFAULT_PROBE_CAP).unwrap();
        assert_eq!((r.s.value, r.r.value), (4, 2));
        assert_eq!(r.s.witness, Some(vec![0, 0]));
    }

    #[test]
    fn caps_are_enforced() {
        let c = SlicedColoring::new(2, vec![Slice { axis: 0, c: 3, zeros: vec![1] }]).unwrap();
        assert!(matches!(exact_report_sliced(&c, 10), Err(Error::ResourceLimit { .. })));
        assert!(matches!(
            representative_scan(&Uniform(2, Color::Red), ScanMode::ExactRepresentative, DEFAULT_PROBE_CAP),
            Err(Error::NoExactMethod(_))
        ));
    }

    #[test]
    fn sampling_without_samples_or_witnesses() {
        let r = sampled_report(&Uniform(2, Color::Red), &SampleRegion::Box { lo: -3, hi: 3 }, 0, 0, &[]).unwrap();
        assert_eq!(r.s.value, 0);
        assert_eq!(r.points_scanned, 0);
    }

    #[test]
    fn sampling_is_reproducible() {
        let c = SlicedColoring::new(2, vec![Slice { axis: 0, c: 3, zeros: vec![1] }]).unwrap();
        let region = SampleRegion::Representative;
        let a = sampled_report(&c, &region, 10_000, 7, &[]).unwrap();
        let b = sampled_report(&c, &region, 10_000, 7, &[]).unwrap();
        assert_eq!(a, b);
        assert!(a.replays(&c));
    }

    #[test]
    fn decomposition_matches_direct_scan() {
        let c = SlicedColoring::new(
            4,
            vec![
                Slice { axis: 0, c: 3, zeros: vec![1] },
                Slice { axis: 1, c: -3, zeros: vec![] },
                Slice { axis: 2, c: 4, zeros: vec![] },
            ],
        )
        .unwrap();
        let direct = exact_report_sliced(&c, DEFAULT_PROBE_CAP).unwrap();
        let parts = c
            .components()
            .into_iter()
            .map(|(coords, sub)| (coords, representative_scan(&sub, ScanMode::ExactRepresentative, DEFAULT_PROBE_CAP).unwrap()))
            .collect();
        let combined = combine_or_product(4, parts).unwrap();
        for (a, b) in [
            (&direct.s, &combined.s),
            (&direct.r, &combined.r),
            (&direct.sr, &combined.sr),
            (&direct.sb, &combined.sb),
            (&direct.s_red, &combined.s_red),
            (&direct.s_blue, &combined.s_blue),
        ] {
            assert_eq!(a.value, b.value);
        }
        assert!(combined.replays(&c));
    }
}
