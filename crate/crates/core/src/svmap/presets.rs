use std::cmp::Ordering;

use super::{Affine, Branch, Exception, PiecewiseMap, Relation};
use crate::error::{Error, Result};
use crate::space::{FiniteSet, FiniteSpace, IntervalSpace, TOL};

/// A single-valued piecewise-affine map on an interval carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn {
    map: PiecewiseMap,
}

impl PiecewiseFn {
    /// `branches` lists `(lo, hi, alpha, beta)`; adjacent branches may
    /// disagree at a shared endpoint, in which case both values are kept.
    pub fn new(space: IntervalSpace, branches: &[(f64, f64, f64, f64)]) -> Result<Self> {
        let branches =
            branches.iter().map(|&(lo, hi, a, b)| Branch::single(lo, hi, a, b)).collect();
        Ok(PiecewiseFn { map: PiecewiseMap::new(space, branches, Vec::new())? })
    }

    pub fn space(&self) -> &IntervalSpace {
        self.map.space()
    }

    /// The value at `x` (the leftmost one at a jump).
    pub fn apply(&self, x: f64) -> Result<f64> {
        Ok(self.map.eval(x)?.points()[0])
    }

    pub fn as_map(&self) -> &PiecewiseMap {
        &self.map
    }

    pub fn into_map(self) -> PiecewiseMap {
        self.map
    }

    /// Openness as a map onto its own image `f(X)`.
    pub fn is_open_onto_image(&self) -> Result<bool> {
        let image = self.map.eval_set(self.space().carrier())?;
        Ok(self.open_relative_to(&image))
    }

    /// Every value `y = f(p)` at a breakpoint is covered on each side on
    /// which the image `target` extends past `y`.
    fn open_relative_to(&self, target: &crate::space::IntervalSet) -> bool {
        if self.map.has_flat_piece() {
            return false;
        }
        self.map.evidence().iter().all(|e| {
            e.image.iter().all(|&y| {
                let (lo, hi) = target
                    .parts()
                    .iter()
                    .copied()
                    .find(|&(a, b)| y >= a - TOL && y <= b + TOL)
                    .unwrap_or((y, y));
                let need_below = y > lo + TOL;
                let need_above = y < hi - TOL;
                let (below, above) = self.coverage(e.x, y);
                (!need_below || below) && (!need_above || above)
            })
        })
    }

    fn coverage(&self, p: f64, y: f64) -> (bool, bool) {
        let mut below = false;
        let mut above = false;
        for b in self.map.branches() {
            for q in &b.pieces {
                if (q.apply(p) - y).abs() > TOL || q.is_flat() {
                    continue;
                }
                let has_left = b.lo < p - TOL && b.hi >= p - TOL;
                let has_right = b.hi > p + TOL && b.lo <= p + TOL;
                let rising = q.alpha > 0.0;
                if has_left {
                    if rising {
                        below = true;
                    } else {
                        above = true;
                    }
                }
                if has_right {
                    if rising {
                        above = true;
                    } else {
                        below = true;
                    }
                }
            }
        }
        (below, above)
    }

    /// The fiber map `x ↦ f^{-1}(f(x))`.
    pub fn fiber_map(&self) -> Result<PiecewiseMap> {
        let m = &self.map;
        if m.has_flat_piece() {
            return Err(Error::Unsupported("fibers of a flat piece are intervals".into()));
        }
        let bps = m.breakpoints().to_vec();
        let cells: Vec<(f64, f64, Affine)> = m
            .branches()
            .iter()
            .flat_map(|b| {
                let inner: Vec<(f64, f64)> = bps
                    .windows(2)
                    .filter(|w| w[0] >= b.lo - TOL && w[1] <= b.hi + TOL && w[1] - w[0] > TOL)
                    .map(|w| (w[0], w[1]))
                    .collect();
                inner.into_iter().map(move |(lo, hi)| (lo, hi, b.pieces[0]))
            })
            .collect();

        // points where some x' = g_j^{-1}(f_i(x)) crosses a breakpoint
        let mut cuts: Vec<f64> = bps.clone();
        for &(lo, hi, fi) in &cells {
            for &(_, _, fj) in &cells {
                for &b in &bps {
                    let x = (fj.apply(b) - fi.beta) / fi.alpha;
                    if x > lo + TOL && x < hi - TOL {
                        cuts.push(x);
                    }
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        cuts.dedup_by(|a, b| (*a - *b).abs() <= TOL);

        let mut branches = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let Some(&(_, _, fi)) = cells.iter().find(|c| mid > c.0 && mid < c.1) else {
                continue;
            };
            let mut pieces = Vec::new();
            for &(lo, hi, fj) in &cells {
                let g = Affine::new(fi.alpha / fj.alpha, (fi.beta - fj.beta) / fj.alpha);
                let xm = g.apply(mid);
                if xm > lo && xm < hi {
                    pieces.push(g);
                }
            }
            branches.push(Branch::new(w[0], w[1], pieces));
        }

        let mut exceptions = Vec::new();
        for &x in &cuts {
            if !m.space().contains(x) {
                continue;
            }
            let mut exact = Vec::new();
            for y in m.eval(x)?.points() {
                exact.extend(m.preimage_points(y)?);
            }
            exact.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            exact.dedup_by(|a, b| (*a - *b).abs() <= TOL);
            let mut natural: Vec<f64> = branches
                .iter()
                .filter(|b| x >= b.lo - TOL && x <= b.hi + TOL)
                .flat_map(|b| b.pieces.iter().map(move |q| q.apply(x)))
                .collect();
            natural.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            natural.dedup_by(|a, b| (*a - *b).abs() <= TOL);
            let same = exact.len() == natural.len()
                && exact.iter().zip(&natural).all(|(a, b)| (a - b).abs() <= TOL);
            if !same {
                exceptions.push(Exception::new(x, exact));
            }
        }
        PiecewiseMap::new(m.space().clone(), branches, exceptions)
    }
}

/// A single-valued map on a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteFn {
    space: FiniteSpace,
    succ: Vec<usize>,
}

impl FiniteFn {
    pub fn new(space: FiniteSpace, succ: Vec<usize>) -> Result<Self> {
        if succ.len() != space.len() {
            return Err(Error::Construction("one value per point is required".into()));
        }
        for &y in &succ {
            space.check(y)?;
        }
        Ok(FiniteFn { space, succ })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.succ[x]
    }

    pub fn as_relation(&self) -> Relation {
        Relation::from_fn(self.space.clone(), &self.succ).expect("validated on construction")
    }

    /// The fiber map `x ↦ f^{-1}(f(x))`.
    pub fn fiber_map(&self) -> Relation {
        let images = (0..self.succ.len())
            .map(|x| {
                (0..self.succ.len()).filter(|&z| self.succ[z] == self.succ[x]).collect::<FiniteSet>()
            })
            .collect();
        Relation::new(self.space.clone(), images).expect("fibers contain their base point")
    }
}

/// The tent map `x ↦ c·min(x, 2 − x)` on `[0, 2]` for `√2 ≤ c ≤ 2`.
pub fn tent_family(c: f64) -> Result<PiecewiseFn> {
    if !(c >= std::f64::consts::SQRT_2 - 1e-12 && c <= 2.0) {
        return Err(Error::Domain(format!("tent slope {c} lies outside [√2, 2]")));
    }
    PiecewiseFn::new(IntervalSpace::interval(0.0, 2.0)?, &[(0.0, 1.0, c, 0.0), (1.0, 2.0, -c, 2.0 * c)])
}

/// The identity on `[a, b]`.
pub fn identity_fn(a: f64, b: f64) -> Result<PiecewiseFn> {
    PiecewiseFn::new(IntervalSpace::interval(a, b)?, &[(a, b, 1.0, 0.0)])
}

/// The two-valued map `x ↦ {f(|x|), −f(|x|)}` on `[−b, −a] ∪ [a, b]`.
pub fn symmetrize(f: &PiecewiseFn) -> Result<PiecewiseMap> {
    let comps = f.space().components();
    if comps.len() != 1 {
        return Err(Error::Construction("symmetrize needs a single interval".into()));
    }
    let (a, b) = comps[0];
    if a < 0.0 {
        return Err(Error::Construction(format!("symmetrize needs a ≥ 0, got {a}")));
    }
    if !f.as_map().is_continuous() {
        return Err(Error::Precondition("symmetrize needs a continuous map".into()));
    }
    let space = if a <= TOL {
        IntervalSpace::interval(-b, b)?
    } else {
        IntervalSpace::new(vec![(-b, -a), (a, b)])?
    };
    let mut branches = Vec::new();
    for br in f.as_map().branches() {
        let p = br.pieces[0];
        branches.push(Branch::new(
            -br.hi,
            -br.lo,
            vec![Affine::new(-p.alpha, p.beta), Affine::new(p.alpha, -p.beta)],
        ));
        branches.push(Branch::new(
            br.lo,
            br.hi,
            vec![p, Affine::new(-p.alpha, -p.beta)],
        ));
    }
    PiecewiseMap::new(space, branches, Vec::new())
}

/// `F(x) = {2 − 2x}` on `[0, 1)`, `{0, 2}` at `1`, `{4 − 2x}` on `(1, 2]`.
pub fn example_3_11() -> PiecewiseMap {
    PiecewiseMap::new(
        IntervalSpace::interval(0.0, 2.0).expect("valid interval"),
        vec![Branch::single(0.0, 1.0, -2.0, 2.0), Branch::single(1.0, 2.0, -2.0, 4.0)],
        vec![Exception::new(1.0, vec![0.0, 2.0])],
    )
    .expect("valid preset")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{IntervalSet, Rational};
    use crate::svmap::System;

    fn pts(v: &[f64]) -> IntervalSet {
        IntervalSet::from_points(v.iter().copied())
    }

    #[test]
    fn tent_values() {
        let t = tent_family(2.0).unwrap();
        assert_eq!(t.apply(1.0).unwrap(), 2.0);
        assert_eq!(t.apply(2.0).unwrap(), 0.0);
        assert_eq!(t.apply(0.5).unwrap(), 1.0);
        assert!(matches!(tent_family(1.0), Err(Error::Domain(_))));
        assert!(matches!(tent_family(2.5), Err(Error::Domain(_))));
        assert!(tent_family(std::f64::consts::SQRT_2).is_ok());
    }

    #[test]
    fn symmetrized_tent() {
        let f = symmetrize(&tent_family(2.0).unwrap()).unwrap();
        assert!(f.eval(0.5).unwrap().approx_eq(&pts(&[-1.0, 1.0])));
        assert!(f.eval(0.0).unwrap().approx_eq(&pts(&[0.0])));
        assert!(f.is_continuous());
        let mut rng = crate::rng::SeededRng::new(5);
        for _ in 0..100 {
            let x = f.sample(&mut rng);
            assert!(f.eval(x).unwrap().approx_eq(&f.eval(-x).unwrap()));
        }
    }

    #[test]
    fn symmetrize_with_gap_gives_two_components() {
        let g = PiecewiseFn::new(IntervalSpace::interval(1.0, 2.0).unwrap(), &[(1.0, 2.0, -1.0, 3.0)])
            .unwrap();
        let f = symmetrize(&g).unwrap();
        assert_eq!(f.space().components(), &[(-2.0, -1.0), (1.0, 2.0)]);
        assert!((f.space().scale() - 0.25).abs() < 1e-15);
        assert!(f.eval(-1.5).unwrap().approx_eq(&pts(&[-1.5, 1.5])));
    }

    #[test]
    fn symmetrize_rejects_escaping_images() {
        assert!(matches!(
            PiecewiseFn::new(IntervalSpace::interval(0.0, 1.0).unwrap(), &[(0.0, 1.0, 2.0, 0.0)]),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn fiber_of_identity_is_trivial() {
        let f = identity_fn(0.0, 1.0).unwrap().fiber_map().unwrap();
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            assert!(f.eval(x).unwrap().approx_eq(&pts(&[x])));
        }
        assert!(f.is_continuous());
    }

    #[test]
    fn fiber_of_tent() {
        let tent = tent_family(2.0).unwrap();
        let f = tent.fiber_map().unwrap();
        assert!(f.eval(0.5).unwrap().approx_eq(&pts(&[0.5, 1.5])));
        assert!(f.eval(1.0).unwrap().approx_eq(&pts(&[1.0])));
        // the full tent is open onto [0, 2], and its fiber map is continuous
        assert!(tent.as_map().is_open());
        assert!(f.is_continuous());
    }

    #[test]
    fn fiber_detects_non_open_map() {
        let s = IntervalSpace::interval(0.0, 3.0).unwrap();
        let g = PiecewiseFn::new(s, &[(0.0, 2.0, 1.0, 0.0), (2.0, 3.0, -1.0, 4.0)]).unwrap();
        assert!(!g.is_open_onto_image().unwrap());
        let fib = g.fiber_map().unwrap();
        assert!(fib.eval(1.0).unwrap().approx_eq(&pts(&[1.0, 3.0])));
        assert!(!fib.is_continuous());
        assert!(tent_family(1.5).unwrap().is_open_onto_image().unwrap());
        assert!(identity_fn(0.0, 1.0).unwrap().is_open_onto_image().unwrap());
    }

    #[test]
    fn finite_fiber() {
        let s = FiniteSpace::on_line(&[Rational::from(0), Rational::from(1), Rational::from(2)]).unwrap();
        let f = FiniteFn::new(s, vec![2, 2, 0]).unwrap();
        let fib = f.fiber_map();
        assert_eq!(fib.eval(0).unwrap(), &FiniteSet::new([0, 1]));
        assert_eq!(fib.eval(2).unwrap(), &FiniteSet::singleton(2));
    }
}
