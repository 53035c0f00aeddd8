//! Expansiveness on finite systems, grid quantization of interval systems,
//! and the sampled check that the shift inherits the constant `δ/2`.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbits::{extend_orbit, rho_prefix, ExtendPolicy};
use crate::rng::SeededRng;
use crate::space::{rational_from_f64, rational_to_f64, FiniteSet, FiniteSpace, Rational, TOL};
use crate::svmap::{PiecewiseMap, Relation, System};

/// Largest grid accepted by [`quantize`].
pub const MAX_GRID_POINTS: usize = 4096;

/// Caveat attached to certificates computed on a quantized grid.
pub const GRID_CAVEAT: &str = "verdict computed on a quantized grid; it is evidence for the interval system, not a proof";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansiveVerdict {
    Expansive,
    NotExpansive,
}

/// Two orbit segments with distinct heads that stay δ-close. The pair at the
/// last index equals the pair at `cycle_start`, so the segments extend to
/// infinite orbits with the same property.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessPair {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub distances: Vec<f64>,
    pub cycle_start: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansivenessCertificate {
    pub delta: f64,
    pub verdict: ExpansiveVerdict,
    pub witness_pair: Option<WitnessPair>,
    /// Pairs `(x, y)` with `d(x, y) < δ`.
    pub product_nodes: usize,
    /// Pairs that start an infinite δ-close path.
    pub surviving_nodes: usize,
    pub caveat: Option<String>,
}

impl WitnessPair {
    /// Both rows are orbits, heads differ, every distance is below `delta`,
    /// and the final pair repeats the pair at `cycle_start`.
    pub fn is_valid(&self, f: &Relation, delta: f64) -> bool {
        let n = self.x.len();
        n >= 2
            && self.y.len() == n
            && self.cycle_start < n - 1
            && self.x[0] != self.y[0]
            && crate::orbits::validate_orbit(f, &self.x)
            && crate::orbits::validate_orbit(f, &self.y)
            && (0..n).all(|i| f.dist(self.x[i], self.y[i]) < delta)
            && self.x[n - 1] == self.x[self.cycle_start]
            && self.y[n - 1] == self.y[self.cycle_start]
    }
}

/// Product graph on δ-close pairs restricted to the nodes that start an
/// infinite path.
struct Survivors {
    nodes: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

fn prune(f: &Relation, delta: f64) -> Survivors {
    let n = f.len();
    let nodes: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| f.dist(x, y) < delta)
        .collect();
    let index: HashMap<(usize, usize), usize> = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let index = &index;
    let succ: Vec<Vec<usize>> = nodes
        .par_iter()
        .map(|&(x, y)| {
            let ys = f.image(y);
            f.image(x)
                .into_iter()
                .flat_map(|a| ys.iter().filter_map(move |&b| index.get(&(a, b)).copied()).collect::<Vec<_>>())
                .collect()
        })
        .collect();
    let mut pred = vec![Vec::new(); nodes.len()];
    for (i, out) in succ.iter().enumerate() {
        for &j in out {
            pred[j].push(i);
        }
    }
    let mut out_degree: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut alive = vec![true; nodes.len()];
    let mut queue: VecDeque<usize> = (0..nodes.len()).filter(|&i| out_degree[i] == 0).collect();
    while let Some(i) = queue.pop_front() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &p in &pred[i] {
            out_degree[p] -= 1;
            if out_degree[p] == 0 && alive[p] {
                queue.push_back(p);
            }
        }
    }
    Survivors { nodes, succ, alive }
}

/// Decides whether `delta` is an expansive constant of a finite system.
///
/// A pair survives pruning exactly when it starts an infinite path of
/// δ-close pairs; the system is expansive iff every survivor is diagonal.
/// The witness starts at the smallest surviving off-diagonal pair and
/// follows the smallest surviving successor until a pair repeats.
pub fn certify_expansive(f: &Relation, delta: f64) -> Result<ExpansivenessCertificate> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let s = prune(f, delta);
    let surviving_nodes = s.alive.iter().filter(|&&a| a).count();
    let start = (0..s.nodes.len()).find(|&i| s.alive[i] && s.nodes[i].0 != s.nodes[i].1);
    let witness_pair = start.map(|mut i| {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let mut path = Vec::new();
        let cycle_start = loop {
            if let Some(&at) = seen.get(&i) {
                path.push(i);
                break at;
            }
            seen.insert(i, path.len());
            path.push(i);
            i = *s.succ[i]
                .iter()
                .filter(|&&j| s.alive[j])
                .min_by_key(|&&j| s.nodes[j])
                .expect("survivor has a surviving successor");
        };
        WitnessPair {
            x: path.iter().map(|&i| s.nodes[i].0).collect(),
            y: path.iter().map(|&i| s.nodes[i].1).collect(),
            distances: path.iter().map(|&i| f.dist(s.nodes[i].0, s.nodes[i].1)).collect(),
            cycle_start,
        }
    });
    if let Some(w) = &witness_pair {
        if !w.is_valid(f, delta) {
            return Err(Error::InternalConsistency("expansiveness witness does not validate".into()));
        }
    }
    Ok(ExpansivenessCertificate {
        delta,
        verdict: if witness_pair.is_some() { ExpansiveVerdict::NotExpansive } else { ExpansiveVerdict::Expansive },
        witness_pair,
        product_nodes: s.nodes.len(),
        surviving_nodes,
        caveat: None,
    })
}

/// Candidate constants: the distinct positive distances and one value above
/// the diameter. The verdict can only change at these thresholds.
pub fn expansive_candidates(f: &Relation) -> Vec<f64> {
    let mut out: Vec<f64> = f
        .space()
        .distinct_distances()
        .into_iter()
        .filter(|d| *d > Rational::from_integer(0))
        .map(rational_to_f64)
        .collect();
    out.push(1.5);
    out
}

/// Largest candidate at which the system certifies expansive, if any.
///
/// On quantized grids this is an empirical estimate, not the constant of
/// the interval system.
pub fn max_certified_delta(f: &Relation) -> Result<Option<f64>> {
    let cands = expansive_candidates(f);
    let holds = |d: f64| certify_expansive(f, d).map(|c| c.verdict == ExpansiveVerdict::Expansive);
    if !holds(cands[0])? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0, cands.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if holds(cands[mid])? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(cands[lo]))
}

/// Grid relation `F_h` on `{a, a + h, …} ∩ X`: `y ∈ F_h(x)` iff the raw
/// distance from `y` to `F(x)` is at most `h/2`. Every image is nonempty
/// because the grid point nearest to any value of `F(x)` qualifies.
pub fn quantize(f: &PiecewiseMap, h: f64) -> Result<Relation> {
    quantize_with_grid(f, h).map(|(_, r)| r)
}

/// [`quantize`] together with the exact grid positions in carrier order.
pub fn quantize_with_grid(f: &PiecewiseMap, h: f64) -> Result<(Vec<Rational>, Relation)> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("resolution must be positive, got {h}")));
    }
    let space = f.space();
    let (a, b) = (space.lower(), space.upper());
    let steps = ((b - a) / h + TOL).floor();
    if steps + 1.0 > MAX_GRID_POINTS as f64 {
        return Err(Error::ResourceGuard(format!(
            "grid has {} points, above {MAX_GRID_POINTS}",
            steps + 1.0
        )));
    }
    let (ra, rh) = (rational_from_f64(a)?, rational_from_f64(h)?);
    let grid: Vec<(Rational, f64)> = (0..=steps as i64)
        .map(|k| {
            let r = ra + rh * Rational::from_integer(k);
            (r, rational_to_f64(r))
        })
        .filter(|&(_, v)| space.contains(v))
        .collect();
    let labels = grid.iter().map(|&(_, v)| format!("{v}")).collect();
    let positions: Vec<Rational> = grid.iter().map(|&(r, _)| r).collect();
    let fs = FiniteSpace::on_line_labeled(labels, &positions)?;
    let values: Vec<f64> = grid.iter().map(|&(_, v)| v).collect();
    let images = values
        .par_iter()
        .map(|&x| {
            let img = f.eval(x)?.points();
            let ids = img.iter().flat_map(|&y| grid_near(&values, y, h / 2.0 + TOL));
            let set = FiniteSet::new(ids);
            if set.is_empty() {
                return Err(Error::InternalConsistency(format!("empty quantized image at {x}")));
            }
            Ok(set)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((positions, Relation::new(fs, images)?))
}

fn grid_near(values: &[f64], y: f64, r: f64) -> Vec<usize> {
    let lo = values.partition_point(|&v| v < y - r);
    let hi = values.partition_point(|&v| v <= y + r);
    let mut ids: Vec<usize> = (lo..hi).collect();
    if ids.is_empty() {
        let i = values.partition_point(|&v| v < y);
        let nearest = [i.checked_sub(1), (i < values.len()).then_some(i)]
            .into_iter()
            .flatten()
            .min_by(|&p, &q| (values[p] - y).abs().total_cmp(&(values[q] - y).abs()));
        ids.extend(nearest);
    }
    ids
}

/// Certifies a quantized interval system; the result carries [`GRID_CAVEAT`].
pub fn certify_quantized(f: &PiecewiseMap, h: f64, delta: f64) -> Result<ExpansivenessCertificate> {
    let q = quantize(f, h)?;
    let mut cert = certify_expansive(&q, delta)?;
    cert.caveat = Some(GRID_CAVEAT.to_string());
    Ok(cert)
}

/// Sampled check that distinct-head orbits separate in the shift by `δ/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansiveLiftReport {
    pub delta: f64,
    pub depth: usize,
    pub samples: usize,
    /// Pairs with identical heads, which need no separation.
    pub equal_heads: usize,
    pub separated: usize,
    /// Pairs whose largest upper bound reaches `δ/2 − tail` without a partial
    /// sum exceeding it.
    pub inconclusive: usize,
    /// Pairs whose upper bounds stay below `δ/2 − tail` at every shift.
    pub violations: usize,
    /// Largest first separating shift over the separated pairs.
    pub max_horizon: usize,
}

/// For `samples` pairs `u, v` of orbit prefixes with distinct heads, looks
/// for `k ≤ depth` with `ρ(σ^k u, σ^k v).partial > δ/2 − 2^{-depth}`.
///
/// The first orbit is a seeded random orbit. The second starts within δ of
/// its head, or anywhere when that ball holds no other point, and follows
/// the first as closely as the map allows.
pub fn check_expansive_lift<S: System>(
    f: &S,
    delta: f64,
    samples: usize,
    depth: usize,
    seed: u64,
) -> Result<ExpansiveLiftReport> {
    if !(delta > 0.0) || depth == 0 {
        return Err(Error::Domain("delta and depth must be positive".into()));
    }
    let len = 2 * depth + 1;
    let tail = 0.5f64.powi(depth as i32);
    let threshold = delta / 2.0 - tail;
    let outcomes = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = SeededRng::stream(seed, i as u64);
            let x = f.sample(&mut rng);
            let mut y = f.perturb(x, delta, &mut rng);
            if y == x {
                y = f.sample(&mut rng);
            }
            if x == y {
                return Ok(Outcome::EqualHeads);
            }
            let u = extend_orbit(f, &[x], len, ExtendPolicy::Seeded(rng.next_u64()))?;
            let v = extend_orbit(f, &[y], len, ExtendPolicy::Nearest(&u.points))?;
            let mut best_upper: f64 = 0.0;
            for k in 0..=depth {
                let r = rho_prefix(f, &u.points[k..=k + depth], &v.points[k..=k + depth])?;
                if r.partial > threshold {
                    return Ok(Outcome::Separated(k));
                }
                best_upper = best_upper.max(r.upper());
            }
            Ok(if best_upper >= threshold { Outcome::Inconclusive } else { Outcome::Violation })
        })
        .collect::<Result<Vec<Outcome>>>()?;
    let mut report = ExpansiveLiftReport {
        delta,
        depth,
        samples,
        equal_heads: 0,
        separated: 0,
        inconclusive: 0,
        violations: 0,
        max_horizon: 0,
    };
    for o in outcomes {
        match o {
            Outcome::EqualHeads => report.equal_heads += 1,
            Outcome::Separated(k) => {
                report.separated += 1;
                report.max_horizon = report.max_horizon.max(k);
            }
            Outcome::Inconclusive => report.inconclusive += 1,
            Outcome::Violation => report.violations += 1,
        }
    }
    Ok(report)
}

enum Outcome {
    EqualHeads,
    Separated(usize),
    Inconclusive,
    Violation,
}
