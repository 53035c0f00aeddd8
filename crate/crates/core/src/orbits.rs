//! Pseudo-orbits, orbit segments, truncated points of orbit spaces and the
//! weighted metric `ρ` on them.
//!
//! Orbit spaces are infinite products; only finite prefixes are stored. A
//! prefix of length `N + 1` determines `ρ` up to the tail weight `2^{-N}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::svmap::System;

/// Default truncation depth; its tail weight `2^{-32}` is below the tolerance.
pub const DEFAULT_DEPTH: usize = 32;

/// Which orbit space a prefix belongs to.
///
/// * `Right`: `x_{i+1} ∈ F(x_i)`.
/// * `Left`: points `(…, x_{-1}, x_0)` with `x_i ∈ F(x_{i+1})`, stored
///   reflected as `(x_0, x_{-1}, …)`, so the stored adjacency is the right one.
/// * `Inverse`: `x_i ∈ F(x_{i+1})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Right,
    Left,
    Inverse,
}

/// `x_{i+1} ∈ F(x_i)` for every consecutive pair.
pub fn validate_orbit<S: System>(f: &S, pts: &[S::Point]) -> bool {
    pts.windows(2).all(|w| f.is_member(w[1], w[0]))
}

/// `d(x_{i+1}, F(x_i)) < δ` for every consecutive pair.
pub fn validate_pseudo_orbit<S: System>(f: &S, pts: &[S::Point], delta: f64) -> bool {
    pts.windows(2).all(|w| f.lt(f.slack(w[1], w[0]), delta))
}

/// Largest slack `max_i d(x_{i+1}, F(x_i))`, zero for fewer than two points.
pub fn max_slack<S: System>(f: &S, pts: &[S::Point]) -> f64 {
    pts.windows(2).map(|w| f.slack(w[1], w[0])).fold(0.0, f64::max)
}

/// A finite δ-pseudo-orbit `x_0, …, x_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoOrbit<P> {
    pub points: Vec<P>,
    pub delta: f64,
}

impl<P: Copy> PseudoOrbit<P> {
    pub fn new<S: System<Point = P>>(f: &S, points: Vec<P>, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("pseudo-orbit slack must be positive, got {delta}")));
        }
        if points.is_empty() {
            return Err(Error::Domain("empty pseudo-orbit".into()));
        }
        if let Some(i) = points.windows(2).position(|w| !f.lt(f.slack(w[1], w[0]), delta)) {
            return Err(Error::Precondition(format!(
                "step {i} has slack {} which is not below {delta}",
                f.slack(points[i + 1], points[i])
            )));
        }
        Ok(PseudoOrbit { points, delta })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn reversed(&self) -> Vec<P> {
        self.points.iter().rev().copied().collect()
    }
}

/// A finite orbit `y_0, …, y_n` with `y_{i+1} ∈ F(y_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSegment<P> {
    pub points: Vec<P>,
}

impl<P: Copy> OrbitSegment<P> {
    pub fn new<S: System<Point = P>>(f: &S, points: Vec<P>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("empty orbit segment".into()));
        }
        if let Some(i) = points.windows(2).position(|w| !f.is_member(w[1], w[0])) {
            return Err(Error::Adjacency(format!("step {i} leaves the image")));
        }
        Ok(OrbitSegment { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The first `N + 1` coordinates of a point of an orbit space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedOrbitPoint<P> {
    pub flavor: Flavor,
    pub prefix: Vec<P>,
}

fn adjacent<S: System>(f: &S, flavor: Flavor, a: S::Point, b: S::Point) -> bool {
    match flavor {
        Flavor::Right | Flavor::Left => f.is_member(b, a),
        Flavor::Inverse => f.is_member(a, b),
    }
}

impl<P: Copy + PartialEq + std::fmt::Debug> TruncatedOrbitPoint<P> {
    pub fn new<S: System<Point = P>>(f: &S, flavor: Flavor, prefix: Vec<P>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Domain("empty orbit prefix".into()));
        }
        if let Some(i) = prefix.windows(2).position(|w| !adjacent(f, flavor, w[0], w[1])) {
            return Err(Error::Adjacency(format!(
                "coordinates {i} and {} are not adjacent for the {flavor:?} orbit space",
                i + 1
            )));
        }
        Ok(TruncatedOrbitPoint { flavor, prefix })
    }

    /// Index of the last stored coordinate.
    pub fn depth(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn head(&self) -> P {
        self.prefix[0]
    }

    /// Coordinate `k`, the projection `π_k`.
    pub fn coord(&self, k: usize) -> P {
        self.prefix[k]
    }

    pub fn is_valid<S: System<Point = P>>(&self, f: &S) -> bool {
        self.prefix.windows(2).all(|w| adjacent(f, self.flavor, w[0], w[1]))
    }

    pub fn truncate(&self, depth: usize) -> Self {
        TruncatedOrbitPoint {
            flavor: self.flavor,
            prefix: self.prefix[..=depth.min(self.depth())].to_vec(),
        }
    }

    fn drop_head(&self, flavor: Flavor) -> Result<Self> {
        if self.flavor != flavor {
            return Err(Error::Domain(format!("expected a {flavor:?} point, got {:?}", self.flavor)));
        }
        if self.depth() == 0 {
            return Err(Error::Domain("cannot shift a depth-0 prefix".into()));
        }
        Ok(TruncatedOrbitPoint { flavor, prefix: self.prefix[1..].to_vec() })
    }

    /// `σ_rF`: drops the head; depth decreases by one.
    pub fn shift_right(&self) -> Result<Self> {
        self.drop_head(Flavor::Right)
    }

    /// `σ_lF` on the reflected storage.
    pub fn shift_left(&self) -> Result<Self> {
        self.drop_head(Flavor::Left)
    }

    /// `k`-fold shift (any flavor), keeping the remaining coordinates.
    pub fn shift_by(&self, k: usize) -> Result<Self> {
        if k > self.depth() {
            return Err(Error::Domain(format!("shift by {k} exceeds depth {}", self.depth())));
        }
        Ok(TruncatedOrbitPoint { flavor: self.flavor, prefix: self.prefix[k..].to_vec() })
    }

    /// Prepends `p` to a right-flavor point; requires `head ∈ F(p)`.
    pub fn prepend<S: System<Point = P>>(&self, f: &S, p: P) -> Result<Self> {
        if self.flavor != Flavor::Right {
            return Err(Error::Domain("prepend applies to right-flavor points".into()));
        }
        if !f.is_member(self.head(), p) {
            return Err(Error::Adjacency(format!("{:?} is not in the image of {p:?}", self.head())));
        }
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(p);
        prefix.extend_from_slice(&self.prefix);
        Ok(TruncatedOrbitPoint { flavor: Flavor::Right, prefix })
    }
}

/// `F_inv` applied with the choice `z ∈ F(u_0)`: the inverse-flavor point `(z, u_0, u_1, …)`.
pub fn f_inv_step<S: System>(
    f: &S,
    u: &TruncatedOrbitPoint<S::Point>,
    z: S::Point,
) -> Result<TruncatedOrbitPoint<S::Point>> {
    if u.flavor != Flavor::Inverse {
        return Err(Error::Domain("F_inv acts on inverse-flavor points".into()));
    }
    if !f.is_member(z, u.head()) {
        return Err(Error::Adjacency(format!("{z:?} is not in F({:?})", u.head())));
    }
    let mut prefix = vec![z];
    prefix.extend_from_slice(&u.prefix);
    Ok(TruncatedOrbitPoint { flavor: Flavor::Inverse, prefix })
}

/// Truncated value of `ρ`: the true distance lies in `[partial, partial + tail_bound]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoValue {
    pub partial: f64,
    pub tail_bound: f64,
}

impl RhoValue {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail_bound
    }
}

/// `Σ_{n=0}^{N} d(a_n, b_n) / 2^{n+1}` over equal-length prefixes.
pub fn rho_prefix<S: System>(f: &S, a: &[S::Point], b: &[S::Point]) -> Result<RhoValue> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Domain(format!("prefix lengths {} and {} differ", a.len(), b.len())));
    }
    let mut partial = 0.0;
    let mut w = 0.5;
    for (&x, &y) in a.iter().zip(b) {
        partial += f.dist(x, y) * w;
        w *= 0.5;
    }
    Ok(RhoValue { partial, tail_bound: 0.5f64.powi(a.len() as i32 - 1) })
}

pub fn rho<S: System>(
    f: &S,
    u: &TruncatedOrbitPoint<S::Point>,
    v: &TruncatedOrbitPoint<S::Point>,
) -> Result<RhoValue> {
    if u.flavor != v.flavor {
        return Err(Error::Domain("ρ compares points of the same orbit space".into()));
    }
    if u.depth() != v.depth() {
        return Err(Error::Domain(format!("depths {} and {} differ", u.depth(), v.depth())));
    }
    rho_prefix(f, &u.prefix, &v.prefix)
}

/// Successor choice used to extend an orbit segment.
#[derive(Clone, Copy, Debug)]
pub enum ExtendPolicy<'a, P> {
    /// Successor closest to `anchor[i]` at index `i`; past the anchor, the
    /// smallest successor.
    Nearest(&'a [P]),
    /// Smallest successor (smallest id, leftmost value).
    Lexicographic,
    /// Uniform successor drawn from a generator with this seed.
    Seeded(u64),
}

/// Extends a valid orbit segment to `target_len` points.
pub fn extend_orbit<S: System>(
    f: &S,
    pts: &[S::Point],
    target_len: usize,
    policy: ExtendPolicy<'_, S::Point>,
) -> Result<OrbitSegment<S::Point>> {
    if pts.is_empty() {
        return Err(Error::Domain("cannot extend an empty segment".into()));
    }
    if !validate_orbit(f, pts) {
        return Err(Error::Adjacency("the segment to extend is not an orbit".into()));
    }
    let mut out = pts.to_vec();
    let mut rng = match policy {
        ExtendPolicy::Seeded(seed) => Some(SeededRng::new(seed)),
        _ => None,
    };
    while out.len() < target_len {
        let last = *out.last().expect("nonempty");
        let i = out.len();
        let next = match policy {
            ExtendPolicy::Nearest(anchor) if i < anchor.len() => f.nearest_successor(last, anchor[i]),
            ExtendPolicy::Nearest(_) | ExtendPolicy::Lexicographic => smallest(f, last),
            ExtendPolicy::Seeded(_) => {
                let img = f.image(last);
                *rng.as_mut().expect("seeded").choose(&img)
            }
        };
        out.push(next);
    }
    Ok(OrbitSegment { points: out })
}

fn smallest<S: System>(f: &S, x: S::Point) -> S::Point {
    f.image(x)
        .into_iter()
        .min_by(|&a, &b| f.order(a, b))
        .expect("images are nonempty")
}

/// A δ-pseudo-orbit of `length` points: `x_0` uniform, then a uniform point
/// of `F(x_i)` perturbed uniformly within the open δ-ball.
pub fn generate_pseudo_orbit<S: System>(
    f: &S,
    delta: f64,
    length: usize,
    seed: u64,
) -> Result<PseudoOrbit<S::Point>> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("slack must be positive, got {delta}")));
    }
    if length == 0 {
        return Err(Error::Domain("length must be positive".into()));
    }
    let mut rng = SeededRng::new(seed);
    let mut pts = vec![f.sample(&mut rng)];
    while pts.len() < length {
        let img = f.image(*pts.last().expect("nonempty"));
        let z = *rng.choose(&img);
        pts.push(f.perturb(z, delta, &mut rng));
    }
    PseudoOrbit::new(f, pts, delta)
        .map_err(|e| Error::InternalConsistency(format!("generated pseudo-orbit: {e}")))
}
