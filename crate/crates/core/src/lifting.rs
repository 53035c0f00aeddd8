//! Constructive lifts between a system and its orbit spaces.
//!
//! * [`match_orbit`] turns a close pair of heads into a close pair of orbits.
//! * [`lift_pseudo_orbit`] lifts a pseudo-orbit of `F` to a pseudo-orbit of
//!   the shift `σ_rF`. [`shadow_in_shift`] and [`transfer_shadowing_down`]
//!   bring a shadowing orbit back down.
//! * [`transfer_shadowing_up`] turns a base shadowing orbit into a shadowing
//!   point of the shift and records the per-index `ρ` errors.
//! * [`shadow_inverse`] shadows pseudo-orbits of `F^{-1}` by reversal.
//! * [`lift_inv`] lifts a pseudo-orbit of `F` to one of `F_inv` on `Orb_inv`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbits::{
    extend_orbit, f_inv_step, rho, rho_prefix, validate_orbit, validate_pseudo_orbit, ExtendPolicy,
    Flavor, OrbitSegment, TruncatedOrbitPoint, DEFAULT_DEPTH,
};
use crate::shadowing::{decide_finite_shadowing, ShadowEngine, Verdict};
use crate::svmap::{modulus_chain, ModulusChain, PiecewiseMap, Relation, System};

/// Systems whose inverse `y ↦ {x : y ∈ F(x)}` has the same representation.
pub trait Invertible: ShadowEngine + Sized {
    fn inverse_map(&self) -> Result<Self>;
    fn is_usc(&self) -> bool;
    fn is_open(&self) -> bool;
}

impl Invertible for Relation {
    fn inverse_map(&self) -> Result<Self> {
        self.invert()
    }
    fn is_usc(&self) -> bool {
        true
    }
    fn is_open(&self) -> bool {
        true
    }
}

impl Invertible for PiecewiseMap {
    fn inverse_map(&self) -> Result<Self> {
        self.invert()
    }
    fn is_usc(&self) -> bool {
        PiecewiseMap::is_usc(self)
    }
    fn is_open(&self) -> bool {
        PiecewiseMap::is_open(self)
    }
}

/// Per-index errors of a lift together with the bounds they must respect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftReport {
    pub mode: String,
    pub delta: f64,
    pub epsilon: Option<f64>,
    pub eps0: Option<f64>,
    pub depth: usize,
    pub chain: ModulusChain,
    /// Measured upper bounds (`partial + tail`) of the per-index `ρ` errors.
    pub beta: Vec<f64>,
    /// Bound claimed for each entry of `beta`.
    pub bounds: Vec<f64>,
    pub first_violation: Option<usize>,
    pub satisfied: bool,
}

impl LiftReport {
    fn new(mode: &str, delta: f64, depth: usize, chain: ModulusChain, beta: Vec<f64>, bounds: Vec<f64>) -> Self {
        let first_violation = beta.iter().zip(&bounds).position(|(b, c)| !(b < c));
        LiftReport {
            mode: mode.to_string(),
            delta,
            epsilon: None,
            eps0: None,
            depth,
            chain,
            satisfied: first_violation.is_none(),
            first_violation,
            beta,
            bounds,
        }
    }
}

/// An orbit through `x` that follows `orbit_y` within `delta` in `ρ`.
///
/// Requires `d(x, y_0) < δ_1` for the chain of `delta`. Each coordinate is the
/// successor nearest to the corresponding coordinate of `orbit_y`, ties going
/// to the smallest point.
pub fn match_orbit<S: System>(
    f: &S,
    x: S::Point,
    orbit_y: &TruncatedOrbitPoint<S::Point>,
    delta: f64,
) -> Result<TruncatedOrbitPoint<S::Point>> {
    let chain = modulus_chain(f, delta)?;
    match_with_chain(f, x, orbit_y, &chain)
}

fn match_with_chain<S: System>(
    f: &S,
    x: S::Point,
    orbit_y: &TruncatedOrbitPoint<S::Point>,
    chain: &ModulusChain,
) -> Result<TruncatedOrbitPoint<S::Point>> {
    if orbit_y.flavor != Flavor::Right || !orbit_y.is_valid(f) {
        return Err(Error::Precondition("the orbit to follow is not a valid right orbit".into()));
    }
    let d = f.dist(x, orbit_y.head());
    if !f.lt(d, chain.first()) {
        return Err(Error::Precondition(format!(
            "heads are {d} apart, not below δ_1 = {}",
            chain.first()
        )));
    }
    let mut prefix = vec![x];
    for &y in &orbit_y.prefix[1..] {
        let last = *prefix.last().expect("nonempty");
        prefix.push(f.nearest_successor(last, y));
    }
    let out = TruncatedOrbitPoint { flavor: Flavor::Right, prefix };
    let r = rho(f, &out, orbit_y)?;
    if r.upper() > chain.delta {
        return Err(Error::InternalConsistency(format!(
            "matched orbit is {} away in ρ, above {}",
            r.upper(),
            chain.delta
        )));
    }
    Ok(out)
}

/// Lifts a `δ_1`-pseudo-orbit of `F` to a δ-pseudo-orbit of the shift.
///
/// The lifted points have depth `max(depth, N + 1)` with `N` the chain depth,
/// heads equal to the input points and `ρ(σ(x̄_{i-1}), x̄_i) < δ`. The reported
/// `beta[i-1]` is that gap, measured at the depth of `σ(x̄_{i-1})`.
pub fn lift_pseudo_orbit<S: System>(
    f: &S,
    pts: &[S::Point],
    delta: f64,
    depth: Option<usize>,
) -> Result<(Vec<TruncatedOrbitPoint<S::Point>>, LiftReport)> {
    let chain = modulus_chain(f, delta)?;
    let depth = depth.unwrap_or(DEFAULT_DEPTH).max(chain.depth + 1);
    if pts.is_empty() {
        return Err(Error::Domain("empty pseudo-orbit".into()));
    }
    if !validate_pseudo_orbit(f, pts, chain.first()) {
        return Err(Error::Precondition(format!(
            "input is not a δ_1-pseudo-orbit for δ_1 = {}",
            chain.first()
        )));
    }
    let n = pts.len() - 1;
    let last = extend_orbit(f, &[pts[n]], depth + 1, ExtendPolicy::Lexicographic)?;
    let mut lifted = vec![TruncatedOrbitPoint { flavor: Flavor::Right, prefix: last.points }];
    let mut beta = Vec::with_capacity(n);
    for i in (1..=n).rev() {
        let next = lifted.last().expect("nonempty").truncate(depth - 1);
        let bridge = f.nearest_successor(pts[i - 1], pts[i]);
        let matched = match_with_chain(f, bridge, &next, &chain)?;
        let gap = rho(f, &matched, &next)?.upper();
        beta.push(gap);
        lifted.push(matched.prepend(f, pts[i - 1])?);
    }
    lifted.reverse();
    beta.reverse();
    let bounds = vec![delta; beta.len()];
    Ok((lifted, LiftReport::new("shift", delta, depth, chain, beta, bounds)))
}

/// An orbit `y` whose shifts follow the lifted points: `ρ(σ^j y, x̄_j) < ε`.
///
/// The heads come from the base engine and the remaining coordinates follow
/// the last lifted point. Base tolerances `ε/2, ε/4, …` are tried in turn.
/// Returns `None` when no attempt succeeds.
pub fn shadow_in_shift<S: ShadowEngine>(
    f: &S,
    lifted: &[TruncatedOrbitPoint<S::Point>],
    eps: f64,
) -> Result<Option<(OrbitSegment<S::Point>, f64)>> {
    if lifted.is_empty() {
        return Err(Error::Domain("empty lifted sequence".into()));
    }
    let depth = lifted.iter().map(|u| u.depth()).min().expect("nonempty");
    let heads: Vec<S::Point> = lifted.iter().map(|u| u.head()).collect();
    let n = heads.len() - 1;
    let mut anchor = heads.clone();
    anchor.extend_from_slice(&lifted[n].prefix[1..]);
    let mut base_eps = eps / 2.0;
    for _ in 0..6 {
        let report = decide_finite_shadowing(f, &heads, base_eps)?;
        if let Some(w) = report.witness {
            let y = extend_orbit(f, &w, n + depth + 1, ExtendPolicy::Nearest(&anchor))?;
            let worst = (0..=n)
                .map(|j| {
                    rho_prefix(f, &y.points[j..=j + depth], &lifted[j].prefix[..=depth])
                        .map(|r| r.upper())
                })
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            if f.lt(worst, eps) {
                return Ok(Some((y, worst)));
            }
        }
        base_eps /= 2.0;
    }
    Ok(None)
}

/// Projects a shift-level shadowing orbit to the base: `y_j` with
/// `d(y_j, x_j) < 2ε`.
pub fn transfer_shadowing_down<S: System>(
    f: &S,
    shift_witness: &[S::Point],
    pts: &[S::Point],
    eps: f64,
) -> Result<OrbitSegment<S::Point>> {
    if shift_witness.len() < pts.len() {
        return Err(Error::Domain("the witness is shorter than the pseudo-orbit".into()));
    }
    let heads = OrbitSegment::new(f, shift_witness[..pts.len()].to_vec())?;
    if let Some(j) = (0..pts.len()).find(|&j| !f.lt(f.dist(heads.points[j], pts[j]), 2.0 * eps)) {
        return Err(Error::InternalConsistency(format!("coordinate {j} is not within 2ε")));
    }
    Ok(heads)
}

/// Lifts a base shadowing orbit to a shadowing point of the shift.
///
/// `eps0` is the `δ_1` of the chain for `ε/2`. The base witness `z` must lie
/// within `eps0/2` of the heads of `p_shift`. The last point is matched
/// (`ρ < ε/2`) and the others are obtained by prepending `z_j`. `beta[j]`
/// bounds `ρ(x̄_j, z̄_j)` and must stay below
/// `(1/2)^{j+1}(−ε/4) + (ε + eps0)/2`.
pub fn transfer_shadowing_up<S: System>(
    f: &S,
    p_shift: &[TruncatedOrbitPoint<S::Point>],
    base_witness: &[S::Point],
    eps: f64,
) -> Result<(Vec<TruncatedOrbitPoint<S::Point>>, LiftReport)> {
    let chain = modulus_chain(f, eps / 2.0)?;
    let eps0 = chain.first();
    let m = p_shift.len();
    if m == 0 || base_witness.len() != m {
        return Err(Error::Domain("witness and lifted sequence must have equal nonzero length".into()));
    }
    if !validate_orbit(f, base_witness) {
        return Err(Error::Adjacency("the base witness is not an orbit".into()));
    }
    if let Some(j) = (0..m).find(|&j| !f.lt(f.dist(base_witness[j], p_shift[j].head()), eps0 / 2.0)) {
        return Err(Error::Precondition(format!("base witness is not within ε0/2 at index {j}")));
    }
    let depth = p_shift.iter().map(|u| u.depth()).min().expect("nonempty");
    let mut z = vec![match_with_chain(f, base_witness[m - 1], &p_shift[m - 1].truncate(depth), &chain)?];
    for j in (0..m - 1).rev() {
        let next = z.last().expect("nonempty");
        z.push(next.prepend(f, base_witness[j])?.truncate(depth));
    }
    z.reverse();
    for j in 0..m - 1 {
        if z[j].shift_right()?.prefix[..] != z[j + 1].prefix[..depth] {
            return Err(Error::InternalConsistency(format!("shift of z̄_{j} is not z̄_{}", j + 1)));
        }
    }
    let beta = (0..m)
        .map(|j| rho(f, &p_shift[j].truncate(depth), &z[j]).map(|r| r.upper()))
        .collect::<Result<Vec<f64>>>()?;
    let bounds = (0..m)
        .map(|j| 0.5f64.powi(j as i32 + 1) * (-eps / 4.0) + (eps + eps0) / 2.0)
        .collect();
    let mut report = LiftReport::new("up", eps / 2.0, depth, chain, beta, bounds);
    report.epsilon = Some(eps);
    report.eps0 = Some(eps0);
    Ok((z, report))
}

/// Outcome of shadowing a pseudo-orbit of `F^{-1}` by reversal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseShadowReport<P> {
    pub epsilon: f64,
    pub delta: f64,
    pub delta1: f64,
    pub verdict: Verdict,
    /// Orbit of `F^{-1}` within ε of the input.
    pub witness: Option<Vec<P>>,
    pub max_distance: Option<f64>,
}

/// Shadows a `δ_1`-pseudo-orbit of `F^{-1}` where `δ` witnesses ε-shadowing
/// for `F` and `δ_1 = ω(δ/2)`.
///
/// The reversed input is a δ-pseudo-orbit of `F`. It is shadowed with the
/// engine for `F`, and the reversed witness is an orbit of `F^{-1}`.
pub fn shadow_inverse<S: Invertible>(
    f: &S,
    pts: &[S::Point],
    eps: f64,
    delta: f64,
) -> Result<InverseShadowReport<S::Point>> {
    if !f.is_continuous() {
        return Err(Error::Precondition("is_continuous fails".into()));
    }
    if !f.is_onto() {
        return Err(Error::Precondition("is_onto fails".into()));
    }
    if !(eps > 0.0) || !(delta > 0.0) {
        return Err(Error::Domain("eps and delta must be positive".into()));
    }
    let g = f.inverse_map()?;
    let delta1 = inverse_slack(f, delta)?;
    if pts.is_empty() || !validate_pseudo_orbit(&g, pts, delta1) {
        return Err(Error::Precondition(format!(
            "input is not a δ_1-pseudo-orbit of the inverse for δ_1 = {delta1}"
        )));
    }
    let reversed: Vec<S::Point> = pts.iter().rev().copied().collect();
    if !validate_pseudo_orbit(f, &reversed, delta) {
        return Err(Error::InternalConsistency("the reversed input is not a δ-pseudo-orbit".into()));
    }
    let report = decide_finite_shadowing(f, &reversed, eps)?;
    let Some(w) = report.witness else {
        return Ok(InverseShadowReport {
            epsilon: eps,
            delta,
            delta1,
            verdict: Verdict::NotShadowed,
            witness: None,
            max_distance: None,
        });
    };
    let out: Vec<S::Point> = w.into_iter().rev().collect();
    if !validate_orbit(&g, &out) {
        return Err(Error::InternalConsistency("reversed witness is not an inverse orbit".into()));
    }
    let max_distance = out.iter().zip(pts).map(|(&a, &b)| f.dist(a, b)).fold(0.0, f64::max);
    Ok(InverseShadowReport {
        epsilon: eps,
        delta,
        delta1,
        verdict: Verdict::Shadowed,
        witness: Some(out),
        max_distance: Some(max_distance),
    })
}

/// `δ_1 = ω(δ/2)`, the slack admitted for inverse pseudo-orbits.
pub fn inverse_slack<S: System>(f: &S, delta: f64) -> Result<f64> {
    f.modulus(delta / 2.0)
}

/// Lifts a `δ_1`-pseudo-orbit of `F` to a δ-pseudo-orbit of `F_inv`.
///
/// Points of `Orb_inv(F)` are right orbits of `G = F^{-1}`. Each step prepends
/// the successor `x'_{i-1} ∈ F(x_{i-1})` nearest to `x_i` and matches the
/// result to a point with head `x_i` through `G`. `beta[i-1]` is the `F_inv`
/// gap `min_{z ∈ F(x_{i-1})} ρ(z·x̄_{i-1}, x̄_i)`.
pub fn lift_inv<S: Invertible>(
    f: &S,
    pts: &[S::Point],
    delta: f64,
    depth: Option<usize>,
) -> Result<(Vec<TruncatedOrbitPoint<S::Point>>, LiftReport)> {
    if !f.is_usc() {
        return Err(Error::Precondition("is_usc fails".into()));
    }
    if !f.is_onto() {
        return Err(Error::Precondition("is_onto fails".into()));
    }
    if !f.is_open() {
        return Err(Error::Precondition("is_open fails".into()));
    }
    let g = f.inverse_map()?;
    let chain = modulus_chain(&g, delta)?;
    let depth = depth.unwrap_or(DEFAULT_DEPTH).max(chain.depth + 1);
    if pts.is_empty() {
        return Err(Error::Domain("empty pseudo-orbit".into()));
    }
    if !validate_pseudo_orbit(f, pts, chain.first()) {
        return Err(Error::Precondition(format!(
            "input is not a δ_1-pseudo-orbit for δ_1 = {}",
            chain.first()
        )));
    }
    let first = extend_orbit(&g, &[pts[0]], depth + 1, ExtendPolicy::Lexicographic)?;
    let mut lifted = vec![TruncatedOrbitPoint { flavor: Flavor::Inverse, prefix: first.points }];
    let mut beta = Vec::new();
    for i in 1..pts.len() {
        let prev = lifted.last().expect("nonempty").clone();
        let bridge = f.nearest_successor(pts[i - 1], pts[i]);
        let raised = f_inv_step(f, &prev, bridge)?.truncate(depth);
        let as_right = TruncatedOrbitPoint { flavor: Flavor::Right, prefix: raised.prefix };
        let matched = match_with_chain(&g, pts[i], &as_right, &chain)?;
        let next = TruncatedOrbitPoint { flavor: Flavor::Inverse, prefix: matched.prefix };
        let gap = f
            .image(prev.head())
            .into_iter()
            .map(|z| {
                let cand = f_inv_step(f, &prev, z)?.truncate(depth);
                rho(f, &cand, &next).map(|r| r.upper())
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        beta.push(gap);
        lifted.push(next);
    }
    let bounds = vec![delta; beta.len()];
    Ok((lifted, LiftReport::new("inv", delta, depth, chain, beta, bounds)))
}
