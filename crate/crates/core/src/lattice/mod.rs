//! Two-colorings of `Z^d` and their sensitivities.
//!
//! A coloring is any [`ColorOracle`]. The concrete kinds in [`kinds`] also
//! describe, per axis, a finite set of representative coordinates
//! ([`AxisRep`]) such that every lattice point has the same color and the
//! same neighbor colors as its representative. Scanning the product of
//! those sets therefore gives exact values of `s(C)`, `r(C)`, `s^R` and
//! `s^B` over the whole infinite lattice.
//!
//! Axes are numbered from 1 in reports and from 0 in coloring files and in
//! [`Slice`].

mod kinds;
mod scan;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use kinds::{
    double_coloring, reflect, repeated_coloring, AxisRep, Coloring, DoubledColoring, MirrorPeriodicColoring,
    ReflectedColoring, RepeatedColoring, Slice, SlicedColoring,
};
pub use scan::{
    box_report, exact_report, exact_report_periodic, exact_report_sliced, representative_scan, sampled_report,
    ColoringReport, Extremum, SampleRegion, ScanMode, DEFAULT_PROBE_CAP,
};

pub type Point = Vec<i64>;

/// Default search radius for [`min_width`].
pub const DEFAULT_WIDTH_CAP: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn is_blue(self) -> bool {
        self == Color::Blue
    }

    pub fn from_blue(blue: bool) -> Self {
        if blue {
            Color::Blue
        } else {
            Color::Red
        }
    }
}

/// A total, deterministic coloring of `Z^d`.
pub trait ColorOracle: Sync {
    fn dim(&self) -> usize;

    fn color(&self, p: &[i64]) -> Color;

    /// Per-axis representative sets, when the coloring has a finite
    /// exactness certificate.
    fn representatives(&self) -> Option<Vec<AxisRep>> {
        None
    }
}

/// Colors of `p` and of its neighbors `p - e_i`, `p + e_i` along every axis.
fn probe<C: ColorOracle + ?Sized>(c: &C, p: &[i64]) -> (Color, usize, usize) {
    assert_eq!(p.len(), c.dim(), "point dimension");
    let own = c.color(p);
    let mut q = p.to_vec();
    let (mut point, mut axes) = (0, 0);
    for i in 0..p.len() {
        let mut differ = 0;
        for delta in [-1, 1] {
            q[i] = p[i] + delta;
            if c.color(&q) != own {
                differ += 1;
            }
        }
        q[i] = p[i];
        point += differ;
        axes += usize::from(differ > 0);
    }
    (own, point, axes)
}

/// `s(C, p)`: neighbors of `p` colored differently from `p`.
pub fn point_sensitivity<C: ColorOracle + ?Sized>(c: &C, p: &[i64]) -> usize {
    probe(c, p).1
}

/// `r(C, p)`: axes through `p` with at least one differently colored neighbor.
pub fn axis_sensitivity<C: ColorOracle + ?Sized>(c: &C, p: &[i64]) -> usize {
    probe(c, p).2
}

/// Nearest blue axis points on one axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisBlue {
    /// 1-based.
    pub axis: usize,
    pub distance: u64,
    /// Side carrying the nearest blue point; `+1` on ties.
    pub sign: i8,
    pub positive: Option<u64>,
    pub negative: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinWidth {
    pub k: u64,
    pub cap: u64,
    pub axes: Vec<AxisBlue>,
}

impl MinWidth {
    /// Signs that move every nearest blue axis point to the positive side.
    pub fn positive_signs(&self) -> Vec<i8> {
        self.axes.iter().map(|a| a.sign).collect()
    }
}

fn axis_point(d: usize, axis: usize, t: i64) -> Point {
    let mut p = vec![0; d];
    p[axis] = t;
    p
}

/// Smallest `k` such that every axis has a blue point within distance `k`
/// of the origin, searching up to `cap`.
pub fn min_width<C: ColorOracle + ?Sized>(c: &C, cap: u64) -> Result<MinWidth> {
    if cap == 0 {
        return Err(Error::InvalidArgument("min-width cap must be at least 1".into()));
    }
    let d = c.dim();
    let mut axes = Vec::with_capacity(d);
    for axis in 0..d {
        let nearest = |sign: i64| (1..=cap).find(|&t| c.color(&axis_point(d, axis, sign * t as i64)).is_blue());
        let positive = nearest(1);
        let negative = nearest(-1);
        let (distance, sign) = match (positive, negative) {
            (Some(p), Some(n)) if n < p => (n, -1),
            (Some(p), _) => (p, 1),
            (None, Some(n)) => (n, -1),
            (None, None) => return Err(Error::NoBlueOnAxis { axis: axis + 1, cap }),
        };
        axes.push(AxisBlue { axis: axis + 1, distance, sign, positive, negative });
    }
    let k = axes.iter().map(|a| a.distance).max().unwrap_or(0);
    Ok(MinWidth { k, cap, axes })
}

/// Checks the non-triviality condition: red origin and a blue point on
/// every axis within `cap`.
pub fn check_nontrivial<C: ColorOracle + ?Sized>(c: &C, cap: u64) -> Result<MinWidth> {
    if c.color(&vec![0; c.dim()]).is_blue() {
        return Err(Error::OriginNotRed);
    }
    min_width(c, cap)
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// Color is the parity of the coordinate sum.
    pub struct Checkerboard(pub usize);

    impl ColorOracle for Checkerboard {
        fn dim(&self) -> usize {
            self.0
        }
        fn color(&self, p: &[i64]) -> Color {
            Color::from_blue(p.iter().sum::<i64>().rem_euclid(2) == 1)
        }
        fn representatives(&self) -> Option<Vec<AxisRep>> {
            Some(vec![AxisRep::Periodic { period: 2 }; self.0])
        }
    }

    pub struct Uniform(pub usize, pub Color);

    impl ColorOracle for Uniform {
        fn dim(&self) -> usize {
            self.0
        }
        fn color(&self, _: &[i64]) -> Color {
            self.1
        }
    }
}
