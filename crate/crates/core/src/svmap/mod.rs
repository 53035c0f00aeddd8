//! Set-valued maps `F : X -> 2^X` and their topological predicates.
//!
//! Two representations are provided: [`Relation`] on a finite carrier and
//! [`PiecewiseMap`] on an interval carrier. In both, every image `F(x)` is a
//! finite set of points, which is what the orbit and shadowing layers rely
//! on through the [`System`] trait.

mod modulus;
mod piecewise;
mod presets;
mod relation;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::space::{CompactSet, MetricSpace, Point};

pub use modulus::{modulus_chain, nstep_chain, ModulusChain};
pub use piecewise::{Affine, Branch, BreakpointEvidence, Exception, PiecewiseMap};
pub use presets::{
    example_3_11, identity_fn, symmetrize, tent_family, FiniteFn, PiecewiseFn,
};
pub use relation::Relation;

/// A set-valued system seen through finitely many image points.
///
/// Distances are normalized (diameter 1). Strict comparisons go through
/// [`System::lt`], which is exact on finite carriers and treats values
/// within the global tolerance as ties on interval carriers.
pub trait System: Sync {
    type Point: Copy + PartialEq + fmt::Debug + Send + Sync;

    fn dist(&self, x: Self::Point, y: Self::Point) -> f64;

    /// The image `F(x)`, sorted and duplicate free.
    fn image(&self, x: Self::Point) -> Vec<Self::Point>;

    /// Strict `value < bound` under the carrier's tie convention.
    fn lt(&self, value: f64, bound: f64) -> bool;

    /// `y ∈ F(x)`.
    fn is_member(&self, y: Self::Point, x: Self::Point) -> bool;

    /// Deterministic order used for tie-breaking (smallest id, leftmost value).
    fn order(&self, a: Self::Point, b: Self::Point) -> Ordering;

    /// Uniform point of the carrier.
    fn sample(&self, rng: &mut SeededRng) -> Self::Point;

    /// Uniform point strictly within `delta` of `z`.
    fn perturb(&self, z: Self::Point, delta: f64, rng: &mut SeededRng) -> Self::Point;

    /// Some `w > 0` with `d(x,y) < w  =>  d_H(F(x), F(y)) < eta`.
    fn modulus(&self, eta: f64) -> Result<f64>;

    fn is_continuous(&self) -> bool;

    fn is_onto(&self) -> bool;

    /// `d(y, F(x))`.
    fn slack(&self, y: Self::Point, x: Self::Point) -> f64 {
        self.image(x).into_iter().map(|z| self.dist(y, z)).fold(f64::INFINITY, f64::min)
    }

    /// Hausdorff distance between two finite images.
    fn image_hausdorff(&self, x: Self::Point, y: Self::Point) -> f64 {
        let a = self.image(x);
        let b = self.image(y);
        let directed = |p: &[Self::Point], q: &[Self::Point]| {
            p.iter()
                .map(|&u| q.iter().map(|&v| self.dist(u, v)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        directed(&a, &b).max(directed(&b, &a))
    }

    /// Point of `F(x)` closest to `target`; ties broken by [`System::order`].
    fn nearest_successor(&self, x: Self::Point, target: Self::Point) -> Self::Point {
        let mut best: Option<(f64, Self::Point)> = None;
        for z in self.image(x) {
            let d = self.dist(z, target);
            let better = match best {
                None => true,
                Some((bd, bz)) => d < bd || (d == bd && self.order(z, bz) == Ordering::Less),
            };
            if better {
                best = Some((d, z));
            }
        }
        best.expect("images are nonempty").1
    }
}

/// Either representation, for callers that load systems from files.
#[derive(Clone, Debug, PartialEq)]
pub enum SetValuedMap {
    Relation(Relation),
    Piecewise(PiecewiseMap),
}

/// Semicontinuity, openness and surjectivity of a map, with breakpoint
/// evidence for piecewise-linear maps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub usc: bool,
    pub lsc: bool,
    pub continuous: bool,
    pub open: bool,
    pub onto: bool,
    pub closed: bool,
    pub evidence: Vec<BreakpointEvidence>,
}

impl SetValuedMap {
    pub fn space(&self) -> MetricSpace {
        match self {
            SetValuedMap::Relation(r) => MetricSpace::Finite(r.space().clone()),
            SetValuedMap::Piecewise(p) => MetricSpace::Interval(p.space().clone()),
        }
    }

    pub fn eval(&self, x: Point) -> Result<CompactSet> {
        match (self, x) {
            (SetValuedMap::Relation(r), Point::Id(i)) => Ok(CompactSet::Finite(r.eval(i)?.clone())),
            (SetValuedMap::Piecewise(p), Point::Real(v)) => Ok(CompactSet::Interval(p.eval(v)?)),
            _ => Err(Error::Domain("point kind does not match the map".into())),
        }
    }

    pub fn eval_set(&self, a: &CompactSet) -> Result<CompactSet> {
        match (self, a) {
            (SetValuedMap::Relation(r), CompactSet::Finite(s)) => Ok(CompactSet::Finite(r.eval_set(s)?)),
            (SetValuedMap::Piecewise(p), CompactSet::Interval(s)) => {
                Ok(CompactSet::Interval(p.eval_set(s)?))
            }
            _ => Err(Error::Domain("set kind does not match the map".into())),
        }
    }

    pub fn preimage(&self, a: &CompactSet) -> Result<CompactSet> {
        match (self, a) {
            (SetValuedMap::Relation(r), CompactSet::Finite(s)) => Ok(CompactSet::Finite(r.preimage(s)?)),
            (SetValuedMap::Piecewise(p), CompactSet::Interval(s)) => {
                Ok(CompactSet::Interval(p.preimage(s)?))
            }
            _ => Err(Error::Domain("set kind does not match the map".into())),
        }
    }

    pub fn invert(&self) -> Result<SetValuedMap> {
        Ok(match self {
            SetValuedMap::Relation(r) => SetValuedMap::Relation(r.invert()?),
            SetValuedMap::Piecewise(p) => SetValuedMap::Piecewise(p.invert()?),
        })
    }

    pub fn is_usc(&self) -> bool {
        match self {
            SetValuedMap::Relation(_) => true,
            SetValuedMap::Piecewise(p) => p.is_usc(),
        }
    }

    pub fn is_lsc(&self) -> bool {
        match self {
            SetValuedMap::Relation(_) => true,
            SetValuedMap::Piecewise(p) => p.is_lsc(),
        }
    }

    pub fn is_continuous(&self) -> bool {
        self.is_usc() && self.is_lsc()
    }

    pub fn is_open(&self) -> bool {
        match self {
            SetValuedMap::Relation(_) => true,
            SetValuedMap::Piecewise(p) => p.is_open(),
        }
    }

    pub fn is_onto(&self) -> bool {
        match self {
            SetValuedMap::Relation(r) => r.is_onto(),
            SetValuedMap::Piecewise(p) => p.is_onto(),
        }
    }

    pub fn properties(&self) -> PropertyReport {
        match self {
            SetValuedMap::Relation(r) => PropertyReport {
                usc: true,
                lsc: true,
                continuous: true,
                open: true,
                onto: r.is_onto(),
                closed: true,
                evidence: Vec::new(),
            },
            SetValuedMap::Piecewise(p) => p.properties(),
        }
    }
}
