use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{exact_report, ColorOracle, Color, ColoringReport, Point};
use crate::hexbits;
use crate::{Error, Result};

/// Finite representatives for one axis.
///
/// `map` sends a coordinate to its representative; the guarantee is that
/// applying `map` on every axis preserves the color of the point and of all
/// its `2d` neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxisRep {
    /// Values kept as they are; anything else maps to `generic`, which is in
    /// `values` and farther than 1 from every value that matters.
    Set { values: Vec<i64>, generic: i64 },
    /// `0..period`, coordinates reduced modulo `period`.
    Periodic { period: i64 },
    /// Axis of a doubled coloring: `y` lives in the cell `ceil(y / 2)`.
    Doubled(Box<AxisRep>),
    /// Axis of a coloring reflected through the origin.
    Negated(Box<AxisRep>),
}

fn ceil_half(y: i64) -> i64 {
    (y + 1).div_euclid(2)
}

impl AxisRep {
    /// Sorted representative values.
    pub fn values(&self) -> Vec<i64> {
        let mut v: Vec<i64> = match self {
            AxisRep::Set { values, .. } => values.clone(),
            AxisRep::Periodic { period } => (0..*period).collect(),
            AxisRep::Doubled(inner) => inner.values().into_iter().flat_map(|x| [2 * x - 1, 2 * x]).collect(),
            AxisRep::Negated(inner) => inner.values().into_iter().map(|x| -x).collect(),
        };
        v.sort_unstable();
        v
    }

    pub fn map(&self, v: i64) -> i64 {
        match self {
            AxisRep::Set { values, generic } => {
                if values.contains(&v) {
                    v
                } else {
                    *generic
                }
            }
            AxisRep::Periodic { period } => v.rem_euclid(*period),
            AxisRep::Doubled(inner) => {
                let x = ceil_half(v);
                let offset = v - (2 * x - 1);
                2 * inner.map(x) - 1 + offset
            }
            AxisRep::Negated(inner) => -inner.map(-v),
        }
    }

    /// `{v - 1, v, v + 1 : v in relevant} ∪ {max relevant + 3}`.
    pub fn around(relevant: &BTreeSet<i64>) -> Self {
        let mut values = BTreeSet::new();
        for &v in relevant {
            values.extend([v - 1, v, v + 1]);
        }
        let generic = relevant.iter().max().copied().unwrap_or(0) + 3;
        values.insert(generic);
        AxisRep::Set { values: values.into_iter().collect(), generic }
    }
}

/// Points with `x[axis] = c` and `x[i] = 0` for every `i` in `zeros`.
/// Axes are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slice {
    pub axis: usize,
    pub c: i64,
    pub zeros: Vec<usize>,
}

impl Slice {
    #[inline]
    pub fn contains(&self, p: &[i64]) -> bool {
        p[self.axis] == self.c && self.zeros.iter().all(|&i| p[i] == 0)
    }

    /// Row of a slice table: the constant on the non-zero axis, `0` on the
    /// zero set and `*` elsewhere. Only meaningful for single-digit `c`.
    pub fn row(&self, d: usize) -> String {
        (0..d)
            .map(|i| {
                if i == self.axis {
                    char::from_digit(self.c.unsigned_abs() as u32, 10).unwrap_or('#')
                } else if self.zeros.contains(&i) {
                    '0'
                } else {
                    '*'
                }
            })
            .collect()
    }

    /// Whether two slices share a point: no coordinate is pinned to two
    /// different values.
    pub fn intersects(&self, other: &Slice) -> bool {
        let pinned = |s: &Slice, i: usize| -> Option<i64> {
            if i == s.axis {
                Some(s.c)
            } else if s.zeros.contains(&i) {
                Some(0)
            } else {
                None
            }
        };
        let coords: BTreeSet<usize> = [self.axis, other.axis]
            .into_iter()
            .chain(self.zeros.iter().copied())
            .chain(other.zeros.iter().copied())
            .collect();
        coords.into_iter().all(|i| match (pinned(self, i), pinned(other, i)) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
    }
}

/// Blue set is the union of the slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlicedColoring {
    pub d: usize,
    pub slices: Vec<Slice>,
}

impl SlicedColoring {
    pub fn new(d: usize, slices: Vec<Slice>) -> Result<Self> {
        let c = SlicedColoring { d, slices };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.slices {
            if s.axis >= self.d || s.zeros.iter().any(|&z| z >= self.d) {
                return Err(Error::Parse(format!("slice {s:?} refers to an axis outside 0..{}", self.d)));
            }
            if s.c == 0 {
                return Err(Error::Parse(format!("slice {s:?} has constant 0")));
            }
            if s.zeros.contains(&s.axis) {
                return Err(Error::Parse(format!("slice {s:?} pins its own axis to zero")));
            }
        }
        Ok(())
    }

    /// Exactly `d` slices, one per axis, with `|c| >= 3`.
    pub fn check_conforming(&self) -> Result<()> {
        if self.slices.len() != self.d {
            return Err(Error::NotConforming(format!("{} slices in {} dimensions", self.slices.len(), self.d)));
        }
        let mut axes = vec![false; self.d];
        for s in &self.slices {
            if std::mem::replace(&mut axes[s.axis], true) {
                return Err(Error::NotConforming(format!("two slices on axis {}", s.axis + 1)));
            }
            if s.c.abs() < 3 {
                return Err(Error::NotConforming(format!("slice on axis {} has |c| = {} < 3", s.axis + 1, s.c.abs())));
            }
        }
        Ok(())
    }

    /// Slices ordered by their non-zero axis (conforming colorings only).
    pub fn by_axis(&self) -> Result<Vec<&Slice>> {
        self.check_conforming()?;
        let mut v: Vec<&Slice> = self.slices.iter().collect();
        v.sort_by_key(|s| s.axis);
        Ok(v)
    }

    /// Groups of coordinates tied together by some slice, each with the
    /// coloring restricted to it (coordinates renumbered in ascending
    /// order). Coordinates no slice mentions are left out.
    pub fn components(&self) -> Vec<(Vec<usize>, SlicedColoring)> {
        let mut parent: Vec<usize> = (0..self.d).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut used = vec![false; self.d];
        for s in &self.slices {
            used[s.axis] = true;
            for &z in &s.zeros {
                used[z] = true;
                let (a, b) = (find(&mut parent, s.axis), find(&mut parent, z));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; self.d];
        for i in (0..self.d).filter(|&i| used[i]) {
            let r = find(&mut parent, i);
            match root_of[r] {
                Some(g) => groups[g].push(i),
                None => {
                    root_of[r] = Some(groups.len());
                    groups.push(vec![i]);
                }
            }
        }
        groups
            .into_iter()
            .map(|coords| {
                let local = |i: usize| coords.binary_search(&i).expect("slice stays inside its component");
                let slices = self
                    .slices
                    .iter()
                    .filter(|s| coords.binary_search(&s.axis).is_ok())
                    .map(|s| Slice {
                        axis: local(s.axis),
                        c: s.c,
                        zeros: s.zeros.iter().map(|&z| local(z)).collect(),
                    })
                    .collect();
                let sub = SlicedColoring { d: coords.len(), slices };
                (coords, sub)
            })
            .collect()
    }
}

impl ColorOracle for SlicedColoring {
    fn dim(&self) -> usize {
        self.d
    }

    fn color(&self, p: &[i64]) -> Color {
        Color::from_blue(self.slices.iter().any(|s| s.contains(p)))
    }

    fn representatives(&self) -> Option<Vec<AxisRep>> {
        let mut relevant: Vec<BTreeSet<i64>> = vec![BTreeSet::from([0]); self.d];
        for s in &self.slices {
            relevant[s.axis].insert(s.c);
        }
        Some(relevant.iter().map(AxisRep::around).collect())
    }
}

impl fmt::Display for SlicedColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.slices {
            writeln!(f, "{}", s.row(self.d))?;
        }
        Ok(())
    }
}

/// A box coloring tiled over `Z^d` by alternating the box with its mirror
/// image, period `2(b_i + 1)` on axis `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MirrorPeriodicFile", into = "MirrorPeriodicFile")]
pub struct MirrorPeriodicColoring {
    b: Vec<u64>,
    /// Row-major over the `(b_i + 1)` box, last axis fastest; `true` = blue.
    base: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct MirrorPeriodicFile {
    b: Vec<u64>,
    colors: String,
}

impl TryFrom<MirrorPeriodicFile> for MirrorPeriodicColoring {
    type Error = Error;

    fn try_from(f: MirrorPeriodicFile) -> Result<Self> {
        let cells = MirrorPeriodicColoring::cell_count(&f.b)?;
        let base = hexbits::decode_bools(&f.colors, cells)?;
        MirrorPeriodicColoring::new(f.b, base)
    }
}

impl From<MirrorPeriodicColoring> for MirrorPeriodicFile {
    fn from(c: MirrorPeriodicColoring) -> Self {
        MirrorPeriodicFile { colors: hexbits::encode_bools(&c.base), b: c.b }
    }
}

impl MirrorPeriodicColoring {
    const MAX_CELLS: u128 = 1 << 26;

    fn cell_count(b: &[u64]) -> Result<usize> {
        let cells = b.iter().try_fold(1u128, |acc, &bi| acc.checked_mul(bi as u128 + 1));
        match cells {
            Some(c) if c <= Self::MAX_CELLS => Ok(c as usize),
            _ => Err(Error::resource("mirror-periodic base box cells", cells.unwrap_or(u128::MAX), Self::MAX_CELLS)),
        }
    }

    pub fn new(b: Vec<u64>, base: Vec<bool>) -> Result<Self> {
        let cells = Self::cell_count(&b)?;
        if base.len() != cells {
            return Err(Error::Parse(format!("base box has {} cells, expected {cells}", base.len())));
        }
        Ok(MirrorPeriodicColoring { b, base })
    }

    /// Base colors from a function of the cell `m`, `0 <= m_i <= b_i`.
    pub fn from_cells(b: Vec<u64>, mut blue: impl FnMut(&[u64]) -> bool) -> Result<Self> {
        let cells = Self::cell_count(&b)?;
        let mut m = vec![0u64; b.len()];
        let mut base = Vec::with_capacity(cells);
        for _ in 0..cells {
            base.push(blue(&m));
            for i in (0..b.len()).rev() {
                m[i] += 1;
                if m[i] <= b[i] {
                    break;
                }
                m[i] = 0;
            }
        }
        Self::new(b, base)
    }

    pub fn box_sizes(&self) -> &[u64] {
        &self.b
    }

    pub fn base(&self) -> &[bool] {
        &self.base
    }

    pub fn periods(&self) -> Vec<i64> {
        self.b.iter().map(|&b| 2 * (b as i64 + 1)).collect()
    }

    /// Cell of the base box that colors `x`.
    pub fn fold(&self, x: &[i64]) -> Vec<u64> {
        x.iter()
            .zip(&self.b)
            .map(|(&xi, &bi)| {
                let bi = bi as i64;
                let z = xi.rem_euclid(2 * (bi + 1));
                (if z <= bi { z } else { 2 * bi + 1 - z }) as u64
            })
            .collect()
    }

    pub fn cell_color(&self, m: &[u64]) -> Color {
        let idx = m.iter().zip(&self.b).fold(0usize, |acc, (&mi, &bi)| acc * (bi as usize + 1) + mi as usize);
        Color::from_blue(self.base[idx])
    }
}

impl ColorOracle for MirrorPeriodicColoring {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn color(&self, p: &[i64]) -> Color {
        self.cell_color(&self.fold(p))
    }

    fn representatives(&self) -> Option<Vec<AxisRep>> {
        Some(self.periods().into_iter().map(|period| AxisRep::Periodic { period }).collect())
    }
}

/// Blue iff some group of `inner.dim()` consecutive coordinates is blue in
/// `inner`. Groups are laid out row-major: group `g` is coordinates
/// `g*k .. (g+1)*k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedColoring {
    pub inner: Box<Coloring>,
    pub copies: usize,
}

impl ColorOracle for RepeatedColoring {
    fn dim(&self) -> usize {
        self.copies * self.inner.dim()
    }

    fn color(&self, p: &[i64]) -> Color {
        let k = self.inner.dim();
        Color::from_blue(p.chunks(k).any(|g| self.inner.color(g).is_blue()))
    }

    fn representatives(&self) -> Option<Vec<AxisRep>> {
        let inner = self.inner.representatives()?;
        Some((0..self.copies).flat_map(|_| inner.iter().cloned()).collect())
    }
}

/// Every point replaced by a `2 x ... x 2` cube of the same color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubledColoring {
    pub inner: Box<Coloring>,
}

impl ColorOracle for DoubledColoring {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn color(&self, p: &[i64]) -> Color {
        let x: Point = p.iter().map(|&y| ceil_half(y)).collect();
        self.inner.color(&x)
    }

    fn representatives(&self) -> Option<Vec<AxisRep>> {
        Some(self.inner.representatives()?.into_iter().map(|r| AxisRep::Doubled(Box::new(r))).collect())
    }
}

/// `color'(x) = color(signs * x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectedColoring {
    pub inner: Box<Coloring>,
    pub signs: Vec<i8>,
}

impl ColorOracle for ReflectedColoring {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn color(&self, p: &[i64]) -> Color {
        let x: Point = p.iter().zip(&self.signs).map(|(&v, &s)| v * s as i64).collect();
        self.inner.color(&x)
    }

    fn representatives(&self) -> Option<Vec<AxisRep>> {
        let inner = self.inner.representatives()?;
        Some(
            inner
                .into_iter()
                .zip(&self.signs)
                .map(|(r, &s)| if s < 0 { AxisRep::Negated(Box::new(r)) } else { r })
                .collect(),
        )
    }
}

/// Any coloring expressible in a coloring file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Coloring {
    Sliced(SlicedColoring),
    MirrorPeriodic(MirrorPeriodicColoring),
    Repeated(RepeatedColoring),
    Doubled(DoubledColoring),
    Reflected(ReflectedColoring),
}

impl Coloring {
    fn oracle(&self) -> &dyn ColorOracle {
        match self {
            Coloring::Sliced(c) => c,
            Coloring::MirrorPeriodic(c) => c,
            Coloring::Repeated(c) => c,
            Coloring::Doubled(c) => c,
            Coloring::Reflected(c) => c,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Coloring::Sliced(_) => "sliced",
            Coloring::MirrorPeriodic(_) => "mirror-periodic",
            Coloring::Repeated(_) => "repeated",
            Coloring::Doubled(_) => "doubled",
            Coloring::Reflected(_) => "reflected",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Coloring::Sliced(c) => c.validate(),
            Coloring::MirrorPeriodic(_) => Ok(()),
            Coloring::Repeated(c) => {
                if c.copies == 0 {
                    return Err(Error::Parse("repeated coloring needs at least one copy".into()));
                }
                c.inner.validate()
            }
            Coloring::Doubled(c) => c.inner.validate(),
            Coloring::Reflected(c) => {
                if c.signs.len() != c.inner.dim() || c.signs.iter().any(|&s| s != 1 && s != -1) {
                    return Err(Error::Parse(format!("reflection signs {:?} must be ±1 per axis", c.signs)));
                }
                c.inner.validate()
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Coloring = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("colorings serialize")
    }

    pub fn fingerprint(&self) -> String {
        crate::fingerprint(serde_json::to_string(self).expect("colorings serialize").as_bytes())
    }

    pub fn as_sliced(&self) -> Option<&SlicedColoring> {
        match self {
            Coloring::Sliced(c) => Some(c),
            _ => None,
        }
    }
}

impl ColorOracle for Coloring {
    fn dim(&self) -> usize {
        self.oracle().dim()
    }

    fn color(&self, p: &[i64]) -> Color {
        self.oracle().color(p)
    }

    fn representatives(&self) -> Option<Vec<AxisRep>> {
        self.oracle().representatives()
    }
}

impl From<SlicedColoring> for Coloring {
    fn from(c: SlicedColoring) -> Self {
        Coloring::Sliced(c)
    }
}

impl From<MirrorPeriodicColoring> for Coloring {
    fn from(c: MirrorPeriodicColoring) -> Self {
        Coloring::MirrorPeriodic(c)
    }
}

pub fn double_coloring(c: Coloring) -> Coloring {
    Coloring::Doubled(DoubledColoring { inner: Box::new(c) })
}

pub fn reflect(c: Coloring, signs: Vec<i8>) -> Result<Coloring> {
    let r = Coloring::Reflected(ReflectedColoring { inner: Box::new(c), signs });
    r.validate()?;
    Ok(r)
}

/// `copies`-fold repeated coloring of `inner`, after verifying that `inner`
/// has red sensitivity exactly 1. The measurement of `inner` is returned
/// alongside.
///
/// Verification uses an exact scan when `inner` admits one; otherwise
/// `fallback` (an `lo..=hi` box on every axis) is scanned, and without it
/// the precondition cannot be established.
pub fn repeated_coloring(
    inner: Coloring,
    copies: usize,
    probe_cap: u128,
    fallback: Option<(i64, i64)>,
) -> Result<(Coloring, ColoringReport)> {
    if copies == 0 {
        return Err(Error::InvalidArgument("copies must be at least 1".into()));
    }
    let report = match exact_report(&inner, probe_cap) {
        Ok(r) => r,
        Err(e @ Error::ResourceLimit { .. }) | Err(e @ Error::NoExactMethod(_)) => match fallback {
            Some((lo, hi)) => super::box_report(&inner, lo, hi, probe_cap)?,
            None => return Err(e),
        },
        Err(e) => return Err(e),
    };
    if report.sr.value != 1 {
        return Err(Error::InnerRedSensitivity(report.sr.value));
    }
    Ok((Coloring::Repeated(RepeatedColoring { inner: Box::new(inner), copies }), report))
}
