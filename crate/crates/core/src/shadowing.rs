//! Shadowing decisions.
//!
//! * [`decide_finite_shadowing`] decides whether one finite pseudo-orbit is
//!   ε-shadowed by an orbit: exactly on finite carriers (layered reachability)
//!   and by forward propagation of reachable sets through ε-tubes on
//!   piecewise-linear interval maps.
//! * [`decide_shadowing_property`] decides, on a finite carrier, whether every
//!   δ-pseudo-orbit is ε-shadowed, by exploring pairs `(x, S)` of a current
//!   pseudo-orbit point and the set of orbit points still within ε.
//! * [`delta_star`] returns the largest candidate δ for which the property holds.
//! * [`nstep_criterion`] runs the chained construction of the N-step criterion.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbits::validate_orbit;
use crate::space::{rational_to_f64, IntervalSet, TOL};
use crate::svmap::{nstep_chain, ModulusChain, PiecewiseMap, Relation, System};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Shadowed,
    NotShadowed,
    PropertyHolds,
    PropertyFails,
}

impl Verdict {
    /// Positive verdicts (shadowed, property holds).
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::Shadowed | Verdict::PropertyHolds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShadowingReport<P> {
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub verdict: Verdict,
    pub witness: Option<Vec<P>>,
    pub counterexample: Option<Vec<P>>,
    /// Search effort: reachable points (finite), set components (interval)
    /// or explored states (property search).
    pub nodes: u64,
}

/// Systems with a finite shadowing decision procedure.
pub trait ShadowEngine: System {
    /// Decides whether `pts` is ε-shadowed by a finite orbit; the witness is
    /// an orbit `y` with `d(y_i, x_i) < ε` for every `i`.
    fn shadow_segment(&self, pts: &[Self::Point], eps: f64) -> Result<ShadowingReport<Self::Point>>;
}

/// Decides ε-shadowing of the finite sequence `pts`.
pub fn decide_finite_shadowing<S: ShadowEngine>(
    f: &S,
    pts: &[S::Point],
    eps: f64,
) -> Result<ShadowingReport<S::Point>> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    if pts.is_empty() {
        return Err(Error::Domain("empty pseudo-orbit".into()));
    }
    let report = f.shadow_segment(pts, eps)?;
    if let Some(w) = &report.witness {
        let close = w.iter().zip(pts).all(|(&y, &x)| f.lt(f.dist(y, x), eps));
        if w.len() != pts.len() || !validate_orbit(f, w) || !close {
            return Err(Error::InternalConsistency("shadowing witness failed re-validation".into()));
        }
    }
    Ok(report)
}

impl ShadowEngine for Relation {
    fn shadow_segment(&self, pts: &[usize], eps: f64) -> Result<ShadowingReport<usize>> {
        for &x in pts {
            self.space().check(x)?;
        }
        let n = self.len();
        let in_tube = |y: usize, x: usize| self.dist(y, x) < eps;
        let mut reach: Vec<Vec<bool>> = Vec::with_capacity(pts.len());
        reach.push((0..n).map(|y| in_tube(y, pts[0])).collect());
        let mut nodes = reach[0].iter().filter(|&&b| b).count() as u64;
        for &x in &pts[1..] {
            let prev = reach.last().expect("nonempty");
            let mut next = vec![false; n];
            for y in (0..n).filter(|&y| prev[y]) {
                for z in self.images()[y].iter() {
                    next[z] = next[z] || in_tube(z, x);
                }
            }
            let count = next.iter().filter(|&&b| b).count();
            nodes += count as u64;
            if count == 0 {
                return Ok(not_shadowed(eps, nodes));
            }
            reach.push(next);
        }
        let last = reach.len() - 1;
        let mut witness = vec![reach[last].iter().position(|&b| b).expect("nonempty layer")];
        for i in (0..last).rev() {
            let succ = *witness.last().expect("nonempty");
            let y = (0..n)
                .find(|&y| reach[i][y] && self.images()[y].contains(succ))
                .ok_or_else(|| Error::InternalConsistency("broken reachability layer".into()))?;
            witness.push(y);
        }
        witness.reverse();
        Ok(ShadowingReport {
            epsilon: eps,
            delta: None,
            verdict: Verdict::Shadowed,
            witness: Some(witness),
            counterexample: None,
            nodes,
        })
    }
}

fn not_shadowed<P>(eps: f64, nodes: u64) -> ShadowingReport<P> {
    ShadowingReport {
        epsilon: eps,
        delta: None,
        verdict: Verdict::NotShadowed,
        witness: None,
        counterexample: None,
        nodes,
    }
}

/// Largest number of components a reachable set may have during tube search.
pub const MAX_TUBE_COMPONENTS: usize = 100_000;

impl ShadowEngine for PiecewiseMap {
    fn shadow_segment(&self, pts: &[f64], eps: f64) -> Result<ShadowingReport<f64>> {
        let space = self.space();
        for &x in pts {
            space.check(x)?;
        }
        let r = space.to_raw(eps - 2.0 * TOL);
        if r < 0.0 {
            return Ok(not_shadowed(eps, 0));
        }
        let carrier = space.carrier();
        let tube = |x: f64| IntervalSet::new([(x - r, x + r)]).intersect(carrier);
        let mut reach = vec![tube(pts[0])];
        let mut nodes = reach[0].parts().len() as u64;
        for &x in &pts[1..] {
            let next = self.eval_set(reach.last().expect("nonempty"))?.intersect(&tube(x));
            nodes += next.parts().len() as u64;
            if next.parts().len() > MAX_TUBE_COMPONENTS {
                return Err(Error::ResourceGuard(format!(
                    "reachable set split into {} components",
                    next.parts().len()
                )));
            }
            if next.is_empty() {
                return Ok(not_shadowed(eps, nodes));
            }
            reach.push(next);
        }
        let last = reach.len() - 1;
        let mut witness = vec![reach[last].nearest(pts[last]).expect("nonempty")];
        for i in (0..last).rev() {
            let succ = *witness.last().expect("nonempty");
            let candidates: Vec<f64> = self
                .preimage_points(succ)?
                .into_iter()
                .filter(|&y| reach[i].contains(y))
                .collect();
            let y = candidates
                .into_iter()
                .min_by(|a, b| {
                    (a - pts[i]).abs().partial_cmp(&(b - pts[i]).abs()).unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or_else(|| {
                    Error::InternalConsistency(format!("no preimage of {succ} in reachable set {i}"))
                })?;
            witness.push(y);
        }
        witness.reverse();
        Ok(ShadowingReport {
            epsilon: eps,
            delta: None,
            verdict: Verdict::Shadowed,
            witness: Some(witness),
            counterexample: None,
            nodes,
        })
    }
}

/// Size limits for the exhaustive property search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropertyLimits {
    pub max_points: usize,
    pub max_states: usize,
}

impl Default for PropertyLimits {
    fn default() -> Self {
        PropertyLimits { max_points: 20, max_states: 2_000_000 }
    }
}

type Bits = Vec<u64>;

fn bits_from(n: usize, pred: impl Fn(usize) -> bool) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64)];
    for i in (0..n).filter(|&i| pred(i)) {
        b[i / 64] |= 1 << (i % 64);
    }
    b
}

fn bits_iter(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(w, &word)| {
        (0..64).filter(move |k| word >> k & 1 == 1).map(move |k| w * 64 + k)
    })
}

/// Decides whether every δ-pseudo-orbit of `f` is ε-shadowed.
///
/// A pseudo-orbit prefix ending at `x` is summarized by the set `S` of
/// endpoints of orbits that stay within ε of it. Extending by `x'` with
/// `d(x', F(x)) < δ` maps `S` to `F(S) ∩ B(x', ε)`. The property fails iff
/// some reachable summary is empty; the breadth-first order returns a
/// shortest counterexample.
pub fn decide_shadowing_property(
    f: &Relation,
    eps: f64,
    delta: f64,
    limits: PropertyLimits,
) -> Result<ShadowingReport<usize>> {
    if !(eps > 0.0) || !(delta > 0.0) {
        return Err(Error::Domain("eps and delta must be positive".into()));
    }
    let n = f.len();
    if n > limits.max_points {
        return Err(Error::ResourceGuard(format!(
            "{n} points exceed the limit of {} for the property search",
            limits.max_points
        )));
    }
    let balls: Vec<Bits> = (0..n).map(|x| bits_from(n, |y| f.dist(x, y) < eps)).collect();
    let images: Vec<Bits> = (0..n).map(|x| bits_from(n, |y| f.images()[x].contains(y))).collect();
    let steps: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| f.lt(f.slack(y, x), delta)).collect())
        .collect();

    let mut parent: Vec<(usize, Option<usize>)> = Vec::new();
    let mut queue: VecDeque<(usize, Bits)> = VecDeque::new();
    let mut index: HashMap<(usize, Bits), usize> = HashMap::new();
    for x in 0..n {
        let key = (x, balls[x].clone());
        index.insert(key.clone(), parent.len());
        parent.push((x, None));
        queue.push_back(key);
    }

    while let Some((x, s)) = queue.pop_front() {
        let here = index[&(x, s.clone())];
        let mut image = vec![0u64; s.len()];
        for y in bits_iter(&s) {
            for (w, v) in image.iter_mut().zip(&images[y]) {
                *w |= v;
            }
        }
        for &x2 in &steps[x] {
            let s2: Bits = image.iter().zip(&balls[x2]).map(|(a, b)| a & b).collect();
            if s2.iter().all(|&w| w == 0) {
                let mut path = vec![x2];
                let mut cur = Some(here);
                while let Some(i) = cur {
                    path.push(parent[i].0);
                    cur = parent[i].1;
                }
                path.reverse();
                return Ok(ShadowingReport {
                    epsilon: eps,
                    delta: Some(delta),
                    verdict: Verdict::PropertyFails,
                    witness: None,
                    counterexample: Some(path),
                    nodes: parent.len() as u64,
                });
            }
            let key = (x2, s2);
            if !index.contains_key(&key) {
                if parent.len() >= limits.max_states {
                    return Err(Error::ResourceGuard(format!(
                        "property search exceeded {} states",
                        limits.max_states
                    )));
                }
                index.insert(key.clone(), parent.len());
                parent.push((x2, Some(here)));
                queue.push_back(key);
            }
        }
    }
    Ok(ShadowingReport {
        epsilon: eps,
        delta: Some(delta),
        verdict: Verdict::PropertyHolds,
        witness: None,
        counterexample: None,
        nodes: parent.len() as u64,
    })
}

/// Candidate thresholds: the positive slacks `d(y, F(x))` together with `eps`.
pub fn delta_candidates(f: &Relation, eps: f64) -> Vec<f64> {
    let mut c: Vec<f64> = f.positive_slacks().into_iter().map(rational_to_f64).collect();
    c.push(eps);
    c.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    c.dedup();
    c
}

/// Largest candidate δ at which the ε-shadowing property holds, 0 if none.
///
/// The property is monotone in δ, so the candidates are bisected.
pub fn delta_star(f: &Relation, eps: f64, limits: PropertyLimits) -> Result<f64> {
    let cands = delta_candidates(f, eps);
    let holds = |d: f64| -> Result<bool> {
        Ok(decide_shadowing_property(f, eps, d, limits)?.verdict == Verdict::PropertyHolds)
    };
    // invariant: cands[..lo] hold, cands[hi..] fail
    let (mut lo, mut hi) = (0usize, cands.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if holds(cands[mid])? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(if lo == 0 { 0.0 } else { cands[lo - 1] })
}

/// Outcome of the N-step construction on one pseudo-orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NStepReport<P> {
    pub epsilon: f64,
    pub depth: usize,
    pub chain: ModulusChain,
    /// `x_i^N ∈ F^N(x_i)` for every `i` with `i + N` in range.
    pub chained: Vec<P>,
    /// `max_i d(x_i^N, x_{i+N})`.
    pub max_gap: f64,
    /// Every chained point lies within `ε/2` of `x_{i+N}`.
    pub condition: bool,
    /// Every step `j` obeyed `d(x_i^{(j)}, x_{i+j}) < δ_1 + δ_j`.
    pub chain_bounds: bool,
    /// The whole pseudo-orbit is ε-shadowed.
    pub variant_a: bool,
    /// The shifted sequence `x_{n+N}` is ε-shadowed.
    pub variant_b: bool,
    /// The chained sequence `x_n^N` is ε-shadowed.
    pub variant_c: bool,
}

/// Builds the chained points `x_i^{(j)}` of the N-step criterion for a
/// `δ_1`-pseudo-orbit and checks the three shadowing variants.
pub fn nstep_criterion<S: ShadowEngine>(
    f: &S,
    pts: &[S::Point],
    eps: f64,
    depth: usize,
) -> Result<NStepReport<S::Point>> {
    if !f.is_continuous() {
        return Err(Error::Precondition("is_continuous fails".into()));
    }
    if !f.is_onto() {
        return Err(Error::Precondition("is_onto fails".into()));
    }
    let chain = nstep_chain(f, eps, depth)?;
    let d1 = chain.first();
    if pts.len() <= depth {
        return Err(Error::Domain(format!(
            "pseudo-orbit of length {} is too short for N = {depth}",
            pts.len()
        )));
    }
    if !crate::orbits::validate_pseudo_orbit(f, pts, d1) {
        return Err(Error::Precondition(format!("input is not a {d1}-pseudo-orbit")));
    }
    let mut chained = Vec::new();
    let mut max_gap: f64 = 0.0;
    let mut chain_bounds = true;
    for i in 0..pts.len() - depth {
        let mut cur = f.nearest_successor(pts[i], pts[i + 1]);
        chain_bounds &= f.lt(f.dist(cur, pts[i + 1]), d1 + chain.link(1));
        for j in 2..=depth {
            let anchor = f.nearest_successor(pts[i + j - 1], pts[i + j]);
            cur = f.nearest_successor(cur, anchor);
            chain_bounds &= f.lt(f.dist(cur, pts[i + j]), d1 + chain.link(j));
        }
        max_gap = max_gap.max(f.dist(cur, pts[i + depth]));
        chained.push(cur);
    }
    let shadowed = |seq: &[S::Point]| -> Result<bool> {
        Ok(decide_finite_shadowing(f, seq, eps)?.verdict == Verdict::Shadowed)
    };
    Ok(NStepReport {
        epsilon: eps,
        depth,
        condition: f.lt(max_gap, eps / 2.0),
        chain_bounds,
        max_gap,
        variant_a: shadowed(pts)?,
        variant_b: shadowed(&pts[depth..])?,
        variant_c: shadowed(&chained)?,
        chained,
        chain,
    })
}
