use std::cmp::Ordering;

use serde::Serialize;

use super::{PropertyReport, System};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::space::{IntervalSet, IntervalSpace, Segment, TOL};

/// The affine rule `x ↦ alpha·x + beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine {
    pub alpha: f64,
    pub beta: f64,
}

impl Affine {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        Affine { alpha, beta }
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.alpha * x + self.beta
    }

    pub fn is_flat(&self) -> bool {
        self.alpha.abs() <= f64::EPSILON
    }

    /// The inverse rule, absent for flat pieces.
    pub fn inverse(&self) -> Option<Affine> {
        if self.is_flat() {
            None
        } else {
            Some(Affine::new(1.0 / self.alpha, -self.beta / self.alpha))
        }
    }

    /// Image of `[lo, hi]` as an ordered segment.
    pub fn image(&self, lo: f64, hi: f64) -> Segment {
        let (a, b) = (self.apply(lo), self.apply(hi));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// A closed domain `[lo, hi]` on which `F(x)` is the set of values of the pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch {
    pub lo: f64,
    pub hi: f64,
    pub pieces: Vec<Affine>,
}

impl Branch {
    pub fn new(lo: f64, hi: f64, pieces: Vec<Affine>) -> Self {
        Branch { lo, hi, pieces }
    }

    pub fn single(lo: f64, hi: f64, alpha: f64, beta: f64) -> Self {
        Branch::new(lo, hi, vec![Affine::new(alpha, beta)])
    }

    fn contains(&self, x: f64) -> bool {
        x >= self.lo - TOL && x <= self.hi + TOL
    }
}

/// A point whose image is given explicitly, overriding every branch there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exception {
    pub x: f64,
    pub image: Vec<f64>,
}

impl Exception {
    pub fn new(x: f64, image: Vec<f64>) -> Self {
        Exception { x, image }
    }
}

/// Local analysis of a map at one breakpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BreakpointEvidence {
    pub x: f64,
    pub image: Vec<f64>,
    /// Limit set from the left, absent when the carrier does not extend left.
    pub left_limit: Option<Vec<f64>>,
    pub right_limit: Option<Vec<f64>>,
    pub usc: bool,
    pub lsc: bool,
    pub open: bool,
}

/// Open elementary interval between consecutive breakpoints with the pieces
/// active on it.
#[derive(Clone, Debug, PartialEq)]
struct Cell {
    lo: f64,
    hi: f64,
    pieces: Vec<Affine>,
}

/// A set-valued map on a finite union of intervals given by affine branches
/// and finitely many exceptional points. Every image is a finite set.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseMap {
    space: IntervalSpace,
    branches: Vec<Branch>,
    exceptions: Vec<Exception>,
    breakpoints: Vec<f64>,
    cells: Vec<Cell>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn dedup_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v.dedup_by(|a, b| close(*a, *b));
    v
}

fn contains_value(set: &[f64], y: f64) -> bool {
    set.iter().any(|&v| close(v, y))
}

impl PiecewiseMap {
    pub fn new(space: IntervalSpace, branches: Vec<Branch>, exceptions: Vec<Exception>) -> Result<Self> {
        for b in &branches {
            if !(b.lo <= b.hi) || !b.lo.is_finite() || !b.hi.is_finite() {
                return Err(Error::Construction(format!("bad branch domain [{}, {}]", b.lo, b.hi)));
            }
            if b.pieces.is_empty() {
                return Err(Error::Construction(format!("branch [{}, {}] has no pieces", b.lo, b.hi)));
            }
            if !IntervalSet::new([(b.lo, b.hi)]).is_subset(space.carrier()) {
                return Err(Error::Construction(format!(
                    "branch domain [{}, {}] leaves the carrier {}",
                    b.lo,
                    b.hi,
                    space.carrier()
                )));
            }
            for p in &b.pieces {
                let seg = p.image(b.lo, b.hi);
                if !IntervalSet::new([seg]).is_subset(space.carrier()) {
                    return Err(Error::Construction(format!(
                        "piece {}x + {} maps [{}, {}] outside the carrier {}",
                        p.alpha,
                        p.beta,
                        b.lo,
                        b.hi,
                        space.carrier()
                    )));
                }
            }
        }
        for (i, a) in branches.iter().enumerate() {
            for b in &branches[i + 1..] {
                if a.lo.max(b.lo) < a.hi.min(b.hi) - TOL {
                    return Err(Error::Construction(format!(
                        "branches [{}, {}] and [{}, {}] overlap",
                        a.lo, a.hi, b.lo, b.hi
                    )));
                }
            }
        }
        let mut exceptions = exceptions;
        for e in &mut exceptions {
            space.check(e.x).map_err(|err| Error::Construction(err.to_string()))?;
            if e.image.is_empty() {
                return Err(Error::Construction(format!("exception at {} has an empty image", e.x)));
            }
            for &y in &e.image {
                if !space.contains(y) {
                    return Err(Error::Construction(format!(
                        "exception image {y} at {} leaves the carrier",
                        e.x
                    )));
                }
            }
            e.image = dedup_sorted(e.image.clone());
        }
        exceptions.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(Ordering::Equal));
        for w in exceptions.windows(2) {
            if close(w[0].x, w[1].x) {
                return Err(Error::Construction(format!("duplicate exception at {}", w[0].x)));
            }
        }

        let mut pts: Vec<f64> = Vec::new();
        for &(a, b) in space.components() {
            pts.push(a);
            pts.push(b);
        }
        for b in &branches {
            pts.push(b.lo);
            pts.push(b.hi);
        }
        pts.extend(exceptions.iter().map(|e| e.x));
        let breakpoints = dedup_sorted(pts);

        let mut cells = Vec::new();
        for w in breakpoints.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if !space.contains(mid) {
                continue;
            }
            let pieces: Vec<Affine> = branches
                .iter()
                .filter(|b| b.lo <= w[0] + TOL && b.hi >= w[1] - TOL)
                .flat_map(|b| b.pieces.iter().copied())
                .collect();
            if pieces.is_empty() {
                return Err(Error::Construction(format!(
                    "no branch covers ({}, {})",
                    w[0], w[1]
                )));
            }
            cells.push(Cell { lo: w[0], hi: w[1], pieces });
        }

        let map = PiecewiseMap { space, branches, exceptions, breakpoints, cells };
        for &p in &map.breakpoints {
            if map.point_values(p).is_empty() {
                return Err(Error::Construction(format!("no branch or exception covers {p}")));
            }
        }
        Ok(map)
    }

    pub fn space(&self) -> &IntervalSpace {
        &self.space
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn exceptions(&self) -> &[Exception] {
        &self.exceptions
    }

    /// Branch endpoints, exceptional points and carrier component endpoints.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Largest absolute slope over all pieces.
    pub fn max_slope(&self) -> f64 {
        self.branches
            .iter()
            .flat_map(|b| b.pieces.iter())
            .map(|p| p.alpha.abs())
            .fold(0.0, f64::max)
    }

    pub fn has_flat_piece(&self) -> bool {
        self.branches.iter().flat_map(|b| b.pieces.iter()).any(Affine::is_flat)
    }

    fn exception_at(&self, x: f64) -> Option<&Exception> {
        self.exceptions.iter().find(|e| close(e.x, x))
    }

    /// Values of the branch pieces at `x`, ignoring exceptions.
    fn natural_values(&self, x: f64) -> Vec<f64> {
        let v = self
            .branches
            .iter()
            .filter(|b| b.contains(x))
            .flat_map(|b| b.pieces.iter().map(move |p| p.apply(x.clamp(b.lo, b.hi))))
            .map(|y| self.space.clamp(y))
            .collect();
        dedup_sorted(v)
    }

    /// Sorted image values at `x` (exception first, else the branches).
    fn point_values(&self, x: f64) -> Vec<f64> {
        match self.exception_at(x) {
            Some(e) => e.image.clone(),
            None => self.natural_values(x),
        }
    }

    pub fn eval(&self, x: f64) -> Result<IntervalSet> {
        self.space.check(x)?;
        Ok(IntervalSet::from_points(self.point_values(x)))
    }

    /// `n`-fold image of the point `x`.
    pub fn iterate_eval(&self, x: f64, n: i64) -> Result<IntervalSet> {
        if n < 0 {
            return Err(Error::Domain("iteration count must be nonnegative".into()));
        }
        self.space.check(x)?;
        let mut set = IntervalSet::point(x);
        for _ in 0..n {
            set = self.eval_set(&set)?;
        }
        Ok(set)
    }

    fn check_subset(&self, a: &IntervalSet) -> Result<()> {
        if a.is_empty() {
            return Err(Error::Domain("empty set".into()));
        }
        if !a.is_subset(self.space.carrier()) {
            return Err(Error::Domain(format!("{a} is not contained in the carrier")));
        }
        Ok(())
    }

    /// Closure of `F(A)`; equals `F(A)` whenever the map is usc.
    pub fn eval_set(&self, a: &IntervalSet) -> Result<IntervalSet> {
        self.check_subset(a)?;
        let mut out: Vec<Segment> = Vec::new();
        for &(lo, hi) in a.parts() {
            for x in [lo, hi] {
                out.extend(self.point_values(x).into_iter().map(|y| (y, y)));
            }
            for &p in &self.breakpoints {
                if p > lo && p < hi {
                    out.extend(self.point_values(p).into_iter().map(|y| (y, y)));
                }
            }
            for c in &self.cells {
                let (l, r) = (lo.max(c.lo), hi.min(c.hi));
                if r - l > TOL {
                    out.extend(c.pieces.iter().map(|p| p.image(l, r)));
                }
            }
        }
        Ok(IntervalSet::new(out).intersect(self.space.carrier()))
    }

    fn hits(&self, x: f64, a: &IntervalSet) -> bool {
        self.point_values(x).iter().any(|&y| a.contains(y))
    }

    /// Closure of `{x : F(x) ∩ A ≠ ∅}` with isolated points kept only when
    /// they genuinely belong to it.
    pub fn preimage(&self, a: &IntervalSet) -> Result<IntervalSet> {
        if a.is_empty() {
            return Err(Error::Domain("preimage of an empty set".into()));
        }
        let mut out: Vec<Segment> = Vec::new();
        for c in &self.cells {
            for p in &c.pieces {
                for &(lo, hi) in a.parts() {
                    if p.is_flat() {
                        if p.beta >= lo - TOL && p.beta <= hi + TOL {
                            out.push((c.lo, c.hi));
                        }
                        continue;
                    }
                    let (x1, x2) = Affine::new(p.alpha, p.beta).inverse().unwrap().image(lo, hi);
                    let (l, r) = (x1.max(c.lo), x2.min(c.hi));
                    if l <= r + TOL {
                        out.push((l, r.max(l)));
                    }
                }
            }
        }
        for &p in &self.breakpoints {
            if self.hits(p, a) {
                out.push((p, p));
            }
        }
        let raw = IntervalSet::new(out);
        let kept = raw
            .parts()
            .iter()
            .copied()
            .filter(|&(lo, hi)| hi - lo > TOL || self.hits(0.5 * (lo + hi), a));
        Ok(IntervalSet::new(kept))
    }

    /// Exact finite preimage `{x : y ∈ F(x)}`.
    pub fn preimage_points(&self, y: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for c in &self.cells {
            for p in &c.pieces {
                match p.inverse() {
                    None if close(p.beta, y) => {
                        return Err(Error::Unsupported(format!(
                            "preimage of {y} contains the interval ({}, {})",
                            c.lo, c.hi
                        )))
                    }
                    None => {}
                    Some(inv) => {
                        let x = inv.apply(y);
                        if x > c.lo + TOL && x < c.hi - TOL {
                            out.push(x);
                        }
                    }
                }
            }
        }
        for &p in &self.breakpoints {
            if contains_value(&self.point_values(p), y) {
                out.push(p);
            }
        }
        Ok(dedup_sorted(out))
    }

    fn attains(&self, y: f64) -> bool {
        match self.preimage_points(y) {
            Ok(v) => !v.is_empty(),
            Err(_) => true,
        }
    }

    fn left_cell(&self, p: f64) -> Option<&Cell> {
        self.cells.iter().find(|c| close(c.hi, p))
    }

    fn right_cell(&self, p: f64) -> Option<&Cell> {
        self.cells.iter().find(|c| close(c.lo, p))
    }

    /// Local semicontinuity and openness analysis at every breakpoint.
    pub fn evidence(&self) -> Vec<BreakpointEvidence> {
        self.breakpoints.iter().map(|&p| self.evidence_at(p)).collect()
    }

    fn evidence_at(&self, p: f64) -> BreakpointEvidence {
        let image = self.point_values(p);
        let left = self.left_cell(p);
        let right = self.right_cell(p);
        let limits = |c: Option<&Cell>| {
            c.map(|c| dedup_sorted(c.pieces.iter().map(|q| self.space.clamp(q.apply(p))).collect()))
        };
        let left_limit = limits(left);
        let right_limit = limits(right);

        let usc = [&left_limit, &right_limit]
            .iter()
            .filter_map(|l| l.as_ref())
            .all(|l| l.iter().all(|&v| contains_value(&image, v)));
        let lsc = [&left_limit, &right_limit]
            .iter()
            .filter_map(|l| l.as_ref())
            .all(|l| image.iter().all(|&y| contains_value(l, y)));

        let open = image.iter().all(|&y| {
            let (clo, chi) = self.space.component_of(y).unwrap_or((y, y));
            let mut below = close(y, clo);
            let mut above = close(y, chi);
            for (cell, from_left) in [(left, true), (right, false)] {
                let Some(cell) = cell else { continue };
                for q in &cell.pieces {
                    if !close(q.apply(p), y) || q.is_flat() {
                        continue;
                    }
                    let rising = q.alpha > 0.0;
                    if rising == from_left {
                        below = true;
                    } else {
                        above = true;
                    }
                }
            }
            below && above
        });

        BreakpointEvidence { x: p, image, left_limit, right_limit, usc, lsc, open }
    }

    pub fn is_usc(&self) -> bool {
        self.evidence().iter().all(|e| e.usc)
    }

    pub fn is_lsc(&self) -> bool {
        self.evidence().iter().all(|e| e.lsc)
    }

    pub fn is_continuous(&self) -> bool {
        self.evidence().iter().all(|e| e.usc && e.lsc)
    }

    /// A flat piece on a nondegenerate cell maps small open intervals onto a
    /// single non-isolated point, so it rules out openness.
    fn flat_value_is_isolated(&self, q: &Affine) -> bool {
        self.space.component_of(q.beta).map_or(false, |(lo, hi)| hi - lo <= TOL)
    }

    pub fn is_open(&self) -> bool {
        let cells_open = self
            .cells
            .iter()
            .flat_map(|c| c.pieces.iter())
            .all(|q| !q.is_flat() || self.flat_value_is_isolated(q));
        cells_open && self.evidence().iter().all(|e| e.open)
    }

    /// A carrier point missing from `F(X)`, if any.
    pub fn onto_witness(&self) -> Option<f64> {
        let carrier = self.space.carrier().clone();
        let image = self.eval_set(&carrier).ok()?;
        for &(lo, hi) in carrier.parts() {
            let mut probes = vec![lo, hi, 0.5 * (lo + hi)];
            for w in image.parts().windows(2) {
                probes.push(0.5 * (w[0].1 + w[1].0));
            }
            if let Some(&(ilo, _)) = image.parts().first() {
                probes.push(0.5 * (lo + ilo));
            }
            if let Some(&(_, ihi)) = image.parts().last() {
                probes.push(0.5 * (hi + ihi));
            }
            for y in probes {
                if y >= lo && y <= hi && !image.contains(y) {
                    return Some(y);
                }
            }
        }
        let mut limit_values: Vec<f64> = Vec::new();
        for &p in &self.breakpoints {
            for c in [self.left_cell(p), self.right_cell(p)].into_iter().flatten() {
                limit_values.extend(c.pieces.iter().map(|q| self.space.clamp(q.apply(p))));
            }
        }
        dedup_sorted(limit_values).into_iter().find(|&y| !self.attains(y))
    }

    pub fn is_onto(&self) -> bool {
        self.onto_witness().is_none()
    }

    pub fn properties(&self) -> PropertyReport {
        let evidence = self.evidence();
        let usc = evidence.iter().all(|e| e.usc);
        let lsc = evidence.iter().all(|e| e.lsc);
        PropertyReport {
            usc,
            lsc,
            continuous: usc && lsc,
            open: self.is_open(),
            onto: self.is_onto(),
            closed: usc,
            evidence,
        }
    }

    /// The inverse map `y ↦ {x : y ∈ F(x)}`; requires `F` onto with no flat piece.
    pub fn invert(&self) -> Result<PiecewiseMap> {
        if let Some(y) = self.onto_witness() {
            return Err(Error::Precondition(format!("map is not onto: {y} has an empty preimage")));
        }
        if self.has_flat_piece() {
            return Err(Error::Unsupported("inverse of a flat piece is interval valued".into()));
        }
        let mut cuts: Vec<f64> = Vec::new();
        for &(a, b) in self.space.components() {
            cuts.push(a);
            cuts.push(b);
        }
        for &p in &self.breakpoints {
            cuts.extend(self.point_values(p));
            for c in [self.left_cell(p), self.right_cell(p)].into_iter().flatten() {
                cuts.extend(c.pieces.iter().map(|q| self.space.clamp(q.apply(p))));
            }
        }
        let cuts = dedup_sorted(cuts);

        let mut branches = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if !self.space.contains(mid) {
                continue;
            }
            let mut pieces = Vec::new();
            for c in &self.cells {
                for q in &c.pieces {
                    let (lo, hi) = q.image(c.lo, c.hi);
                    if mid > lo && mid < hi {
                        pieces.push(q.inverse().expect("no flat pieces"));
                    }
                }
            }
            branches.push(Branch::new(w[0], w[1], pieces));
        }

        let mut exceptions = Vec::new();
        for &y in &cuts {
            if !self.space.contains(y) {
                continue;
            }
            let exact = self.preimage_points(y)?;
            let natural = dedup_sorted(
                branches
                    .iter()
                    .filter(|b| b.contains(y))
                    .flat_map(|b| b.pieces.iter().map(move |q| q.apply(y)))
                    .collect(),
            );
            let same = exact.len() == natural.len()
                && exact.iter().zip(&natural).all(|(a, b)| close(*a, *b));
            if !same {
                exceptions.push(Exception::new(y, exact));
            }
        }
        PiecewiseMap::new(self.space.clone(), branches, exceptions)
            .map_err(|e| Error::InternalConsistency(format!("inverse construction: {e}")))
    }
}

impl System for PiecewiseMap {
    type Point = f64;

    fn dist(&self, x: f64, y: f64) -> f64 {
        self.space.dist(x, y)
    }

    fn image(&self, x: f64) -> Vec<f64> {
        self.point_values(self.space.clamp(x))
    }

    fn lt(&self, value: f64, bound: f64) -> bool {
        value < bound - TOL
    }

    fn is_member(&self, y: f64, x: f64) -> bool {
        contains_value(&self.image(x), y)
    }

    fn order(&self, a: f64, b: f64) -> Ordering {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }

    fn sample(&self, rng: &mut SeededRng) -> f64 {
        let comps = self.space.components();
        let total: f64 = comps.iter().map(|&(a, b)| b - a).sum();
        if total <= 0.0 {
            return rng.choose(comps).0;
        }
        let mut t = rng.uniform() * total;
        for &(a, b) in comps {
            if t <= b - a {
                return a + t;
            }
            t -= b - a;
        }
        comps[comps.len() - 1].1
    }

    fn perturb(&self, z: f64, delta: f64, rng: &mut SeededRng) -> f64 {
        let r = self.space.to_raw(delta - 2.0 * TOL);
        if r <= 0.0 {
            return z;
        }
        for _ in 0..64 {
            let y = z + r * (2.0 * rng.uniform() - 1.0);
            if self.space.carrier().parts().iter().any(|&(a, b)| y >= a && y <= b) {
                return y;
            }
        }
        z
    }

    /// `eta / (2L)` for the largest slope `L`, capped by the component gap so
    /// that close points share a component.
    fn modulus(&self, eta: f64) -> Result<f64> {
        if !(eta > 0.0) {
            return Err(Error::Domain("modulus needs a positive target".into()));
        }
        if !self.is_continuous() {
            return Err(Error::Precondition("modulus needs a continuous map".into()));
        }
        let l = self.max_slope();
        let w = if l > 0.0 { eta / (2.0 * l) } else { 2.0 };
        Ok(w.min(self.space.component_gap()))
    }

    fn is_continuous(&self) -> bool {
        PiecewiseMap::is_continuous(self)
    }

    fn is_onto(&self) -> bool {
        PiecewiseMap::is_onto(self)
    }
}
