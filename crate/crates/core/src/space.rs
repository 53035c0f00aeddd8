//! Compact metric carriers, compact subsets and the Hausdorff metric.
//!
//! Two carriers are supported: finite point sets with an exact rational
//! distance table, and finite unions of closed real intervals with the
//! (scaled) Euclidean metric. Both are normalized to diameter 1 when built.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact distances on finite carriers.
pub type Rational = num_rational::Rational64;

/// Comparison tolerance for interval carriers (normalized units).
pub const TOL: f64 = 1e-9;

/// Converts a float to the simplest rational within float precision
/// (`0.6` becomes `3/5`).
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::approximate_float(x).ok_or_else(|| Error::Domain(format!("{x} has no rational form")))
}

pub fn rational_to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A canonical (sorted, duplicate free) set of point ids of a finite space.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteSet(Vec<usize>);

impl FiniteSet {
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet(v)
    }

    pub fn singleton(id: usize) -> Self {
        FiniteSet(vec![id])
    }

    pub fn ids(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn union(&self, other: &FiniteSet) -> FiniteSet {
        FiniteSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &FiniteSet) -> FiniteSet {
        FiniteSet(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn is_subset(&self, other: &FiniteSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }
}

impl FromIterator<usize> for FiniteSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        FiniteSet::new(iter)
    }
}

/// A finite metric space. Distances are exact rationals normalized so that
/// the diameter is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    raw_diameter: Rational,
}

impl FiniteSpace {
    /// Validates the metric axioms exhaustively and normalizes the table.
    pub fn new(labels: Vec<String>, raw: Vec<Vec<Rational>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Construction("finite space needs at least one point".into()));
        }
        if raw.len() != n || raw.iter().any(|row| row.len() != n) {
            return Err(Error::Construction(format!("distance table must be {n}x{n}")));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::Construction(format!("duplicate point label {a:?}")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let d = raw[i][j];
                if d < Rational::zero() {
                    return Err(Error::Construction(format!("negative distance d({i},{j})")));
                }
                if d != raw[j][i] {
                    return Err(Error::Construction(format!("asymmetric distance d({i},{j})")));
                }
                if (i == j) != d.is_zero() {
                    return Err(Error::Construction(format!(
                        "distance d({i},{j}) must be zero exactly on the diagonal"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if raw[i][k] > raw[i][j] + raw[j][k] {
                        return Err(Error::Construction(format!(
                            "triangle inequality fails for ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        let diameter = raw.iter().flatten().copied().max().unwrap_or_else(Rational::zero);
        let dist = if diameter.is_zero() {
            raw
        } else {
            raw.into_iter().map(|row| row.into_iter().map(|d| d / diameter).collect()).collect()
        };
        Ok(FiniteSpace { labels, dist, raw_diameter: diameter })
    }

    /// Builds a space from float distances; each entry is converted to the
    /// simplest rational within float precision.
    pub fn from_f64(labels: Vec<String>, raw: Vec<Vec<f64>>) -> Result<Self> {
        let table = raw
            .into_iter()
            .map(|row| row.into_iter().map(rational_from_f64).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FiniteSpace::new(labels, table)
    }

    /// Points `p0, p1, ...` at the given positions on the real line.
    pub fn on_line(positions: &[Rational]) -> Result<Self> {
        let labels = (0..positions.len()).map(|i| format!("p{i}")).collect();
        FiniteSpace::on_line_labeled(labels, positions)
    }

    /// Points on the real line with explicit labels. Line distances always
    /// form a metric, so only distinctness is checked.
    pub fn on_line_labeled(labels: Vec<String>, positions: &[Rational]) -> Result<Self> {
        let n = positions.len();
        if n == 0 || labels.len() != n {
            return Err(Error::Construction("need one label per position and at least one point".into()));
        }
        let mut sorted = positions.to_vec();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Construction("positions on the line must be distinct".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(a) = labels.iter().find(|a| !seen.insert(a.as_str())) {
            return Err(Error::Construction(format!("duplicate point label {a:?}")));
        }
        let diameter = sorted[n - 1] - sorted[0];
        let scale = if diameter.is_zero() { Rational::one() } else { diameter };
        let dist = positions
            .iter()
            .map(|a| positions.iter().map(|b| (*a - *b).abs() / scale).collect())
            .collect();
        Ok(FiniteSpace { labels, dist, raw_diameter: diameter })
    }

    /// Default labels `p0, p1, ...`.
    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Domain(format!("unknown point {label:?}")))
    }

    /// Diameter of the table before normalization.
    pub fn raw_diameter(&self) -> Rational {
        self.raw_diameter
    }

    /// Normalized distance. Panics on ids outside the space.
    pub fn dist(&self, x: usize, y: usize) -> Rational {
        self.dist[x][y]
    }

    pub fn try_dist(&self, x: usize, y: usize) -> Result<Rational> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist[x][y])
    }

    pub fn check(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::Domain(format!("point id {x} outside a space of {} points", self.len())))
        }
    }

    pub fn all(&self) -> FiniteSet {
        FiniteSet((0..self.len()).collect())
    }

    pub fn point_to_set(&self, x: usize, set: &FiniteSet) -> Result<Rational> {
        self.check(x)?;
        set.iter()
            .map(|a| self.try_dist(x, a))
            .try_fold(None::<Rational>, |acc, d| -> Result<Option<Rational>> {
                let d = d?;
                Ok(Some(acc.map_or(d, |m: Rational| m.min(d))))
            })?
            .ok_or_else(|| Error::Domain("distance to an empty set".into()))
    }

    pub fn hausdorff(&self, a: &FiniteSet, b: &FiniteSet) -> Result<Rational> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Domain("Hausdorff distance of an empty set".into()));
        }
        let mut best = Rational::zero();
        for x in a.iter() {
            best = best.max(self.point_to_set(x, b)?);
        }
        for y in b.iter() {
            best = best.max(self.point_to_set(y, a)?);
        }
        Ok(best)
    }

    /// Open ball `{y : d(x,y) < eps}`.
    pub fn ball(&self, x: usize, eps: Rational) -> Result<FiniteSet> {
        self.check(x)?;
        if eps <= Rational::zero() {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        Ok(FiniteSet((0..self.len()).filter(|&y| self.dist[x][y] < eps).collect()))
    }

    /// Sorted distinct positive distances.
    pub fn distinct_distances(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> =
            self.dist.iter().flatten().copied().filter(|d| !d.is_zero()).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// A closed piece of the real line; `lo == hi` encodes an isolated point.
pub type Segment = (f64, f64);

/// A compact subset of the real line in canonical form: sorted, disjoint
/// closed segments, with segments closer than [`TOL`] merged.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    parts: Vec<Segment>,
}

impl IntervalSet {
    pub fn new<I: IntoIterator<Item = Segment>>(parts: I) -> Self {
        let mut v: Vec<Segment> =
            parts.into_iter().map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut out: Vec<Segment> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match out.last_mut() {
                Some(last) if lo <= last.1 + TOL => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        IntervalSet { parts: out }
    }

    pub fn point(x: f64) -> Self {
        IntervalSet { parts: vec![(x, x)] }
    }

    pub fn from_points<I: IntoIterator<Item = f64>>(pts: I) -> Self {
        IntervalSet::new(pts.into_iter().map(|x| (x, x)))
    }

    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[Segment] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.parts.first().map(|p| p.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.parts.last().map(|p| p.1)
    }

    /// Membership up to [`TOL`] (raw units).
    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|&(lo, hi)| x >= lo - TOL && x <= hi + TOL)
    }

    /// True when every component is a single point.
    pub fn is_finite(&self) -> bool {
        self.parts.iter().all(|&(lo, hi)| hi - lo <= TOL)
    }

    /// Representative points of a finite set.
    pub fn points(&self) -> Vec<f64> {
        self.parts.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::new(self.parts.iter().chain(other.parts.iter()).copied())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi + TOL {
                    out.push((lo, hi.max(lo)));
                }
            }
        }
        IntervalSet::new(out)
    }

    /// Every component of `self` lies in some component of `other` (up to TOL).
    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.parts
            .iter()
            .all(|&(lo, hi)| other.parts.iter().any(|&(c, d)| lo >= c - TOL && hi <= d + TOL))
    }

    pub fn approx_eq(&self, other: &IntervalSet) -> bool {
        self.parts.len() == other.parts.len()
            && self
                .parts
                .iter()
                .zip(&other.parts)
                .all(|(a, b)| (a.0 - b.0).abs() <= TOL && (a.1 - b.1).abs() <= TOL)
    }

    /// Raw Euclidean distance from `x` to the set.
    pub fn raw_distance(&self, x: f64) -> Option<f64> {
        self.parts
            .iter()
            .map(|&(lo, hi)| if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 })
            .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
    }

    /// Nearest point of the set to `x`; ties go to the leftmost point.
    pub fn nearest(&self, x: f64) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for &(lo, hi) in &self.parts {
            let p = x.clamp(lo, hi);
            let d = (p - x).abs();
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
        best.map(|(_, p)| p)
    }

    /// Raw directed distance `sup_{a in self} d(a, other)`.
    fn raw_directed(&self, other: &IntervalSet) -> f64 {
        let mut best: f64 = 0.0;
        for &(l, r) in &self.parts {
            let mut candidates = vec![l, r];
            for w in other.parts.windows(2) {
                let m = 0.5 * (w[0].1 + w[1].0);
                if m > l && m < r {
                    candidates.push(m);
                }
            }
            for c in candidates {
                best = best.max(other.raw_distance(c).unwrap_or(f64::INFINITY));
            }
        }
        best
    }

    pub fn raw_hausdorff(&self, other: &IntervalSet) -> f64 {
        self.raw_directed(other).max(other.raw_directed(self))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|&(lo, hi)| if hi - lo <= TOL { format!("{{{lo}}}") } else { format!("[{lo}, {hi}]") })
            .collect();
        if parts.is_empty() {
            write!(f, "∅")
        } else {
            write!(f, "{}", parts.join(" ∪ "))
        }
    }
}

/// A relatively open piece of an interval carrier (used for ball descriptors).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Span {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

/// A compact subset of the real line: a finite union of closed intervals,
/// with the Euclidean metric scaled to diameter 1.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSpace {
    carrier: IntervalSet,
    scale: f64,
}

impl IntervalSpace {
    pub fn new(components: Vec<Segment>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Construction("interval space needs a component".into()));
        }
        for &(a, b) in &components {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(Error::Construction(format!("bad component [{a}, {b}]")));
            }
        }
        let carrier = IntervalSet::new(components);
        let span = carrier.max().unwrap_or(0.0) - carrier.min().unwrap_or(0.0);
        if span <= 0.0 {
            return Err(Error::Construction("interval space must have positive diameter".into()));
        }
        Ok(IntervalSpace { carrier, scale: 1.0 / span })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        IntervalSpace::new(vec![(a, b)])
    }

    pub fn carrier(&self) -> &IntervalSet {
        &self.carrier
    }

    pub fn components(&self) -> &[Segment] {
        self.carrier.parts()
    }

    /// Factor `s` with `d(x, y) = s |x - y|`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn lower(&self) -> f64 {
        self.carrier.min().unwrap_or(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.carrier.max().unwrap_or(0.0)
    }

    /// Converts a normalized distance to raw coordinates.
    pub fn to_raw(&self, d: f64) -> f64 {
        d / self.scale
    }

    pub fn contains(&self, x: f64) -> bool {
        self.carrier.contains(x)
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if x.is_finite() && self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x} lies outside the carrier {}", self.carrier)))
        }
    }

    /// Component `(lo, hi)` containing `x`.
    pub fn component_of(&self, x: f64) -> Option<Segment> {
        self.components().iter().copied().find(|&(lo, hi)| x >= lo - TOL && x <= hi + TOL)
    }

    /// Nearest carrier point.
    pub fn clamp(&self, x: f64) -> f64 {
        self.carrier.nearest(x).unwrap_or(x)
    }

    /// Smallest normalized gap between carrier components (`inf` for one component).
    pub fn component_gap(&self) -> f64 {
        self.components()
            .windows(2)
            .map(|w| (w[1].0 - w[0].1) * self.scale)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn dist(&self, x: f64, y: f64) -> f64 {
        (x - y).abs() * self.scale
    }

    pub fn try_dist(&self, x: f64, y: f64) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist(x, y))
    }

    pub fn point_to_set(&self, x: f64, set: &IntervalSet) -> Result<f64> {
        self.check(x)?;
        set.raw_distance(x)
            .map(|d| d * self.scale)
            .ok_or_else(|| Error::Domain("distance to an empty set".into()))
    }

    pub fn hausdorff(&self, a: &IntervalSet, b: &IntervalSet) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Domain("Hausdorff distance of an empty set".into()));
        }
        Ok(a.raw_hausdorff(b) * self.scale)
    }

    /// Open ball in the relative topology, in raw coordinates.
    pub fn ball(&self, x: f64, eps: f64) -> Result<Vec<Span>> {
        self.check(x)?;
        if !(eps > 0.0) {
            return Err(Error::Domain("ball radius must be positive".into()));
        }
        let r = self.to_raw(eps);
        let (lo, hi) = (x - r, x + r);
        Ok(self
            .components()
            .iter()
            .filter(|&&(a, b)| b > lo && a < hi)
            .map(|&(a, b)| Span {
                lo: lo.max(a),
                hi: hi.min(b),
                lo_closed: a > lo,
                hi_closed: b < hi,
            })
            .collect())
    }
}

/// Either kind of carrier, for code that handles both uniformly.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpace {
    Finite(FiniteSpace),
    Interval(IntervalSpace),
}

/// A point of a [`MetricSpace`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Id(usize),
    Real(f64),
}

/// A compact subset of a [`MetricSpace`].
#[derive(Clone, Debug, PartialEq)]
pub enum CompactSet {
    Finite(FiniteSet),
    Interval(IntervalSet),
}

/// Open-ball descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum Ball {
    Finite(FiniteSet),
    Interval(Vec<Span>),
}

impl Ball {
    pub fn contains(&self, p: Point) -> bool {
        match (self, p) {
            (Ball::Finite(s), Point::Id(i)) => s.contains(i),
            (Ball::Interval(spans), Point::Real(x)) => spans.iter().any(|s| s.contains(x)),
            _ => false,
        }
    }
}

fn mismatch() -> Error {
    Error::Domain("point or set does not belong to this kind of space".into())
}

impl MetricSpace {
    pub fn dist(&self, x: Point, y: Point) -> Result<f64> {
        match (self, x, y) {
            (MetricSpace::Finite(s), Point::Id(a), Point::Id(b)) => {
                Ok(rational_to_f64(s.try_dist(a, b)?))
            }
            (MetricSpace::Interval(s), Point::Real(a), Point::Real(b)) => s.try_dist(a, b),
            _ => Err(mismatch()),
        }
    }

    pub fn point_to_set(&self, x: Point, set: &CompactSet) -> Result<f64> {
        match (self, x, set) {
            (MetricSpace::Finite(s), Point::Id(a), CompactSet::Finite(b)) => {
                Ok(rational_to_f64(s.point_to_set(a, b)?))
            }
            (MetricSpace::Interval(s), Point::Real(a), CompactSet::Interval(b)) => {
                s.point_to_set(a, b)
            }
            _ => Err(mismatch()),
        }
    }

    pub fn hausdorff(&self, a: &CompactSet, b: &CompactSet) -> Result<f64> {
        match (self, a, b) {
            (MetricSpace::Finite(s), CompactSet::Finite(a), CompactSet::Finite(b)) => {
                Ok(rational_to_f64(s.hausdorff(a, b)?))
            }
            (MetricSpace::Interval(s), CompactSet::Interval(a), CompactSet::Interval(b)) => {
                s.hausdorff(a, b)
            }
            _ => Err(mismatch()),
        }
    }

    pub fn ball(&self, x: Point, eps: f64) -> Result<Ball> {
        match (self, x) {
            (MetricSpace::Finite(s), Point::Id(a)) => Ok(Ball::Finite(s.ball(a, rational_from_f64(eps)?)?)),
            (MetricSpace::Interval(s), Point::Real(a)) => Ok(Ball::Interval(s.ball(a, eps)?)),
            _ => Err(mismatch()),
        }
    }
}
