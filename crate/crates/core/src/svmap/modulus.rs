use serde::Serialize;

use super::System;
use crate::error::{Error, Result};

/// A backward chain of continuity gaps `δ_1 < δ_2 < … < δ_N`.
///
/// `links[i - 1]` holds `δ_i`, so `links` has `depth` entries and the last
/// one is the final target. For consecutive links,
/// `d(x, y) < δ_i  =>  d_H(F(x), F(y)) < δ_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusChain {
    pub delta: f64,
    pub depth: usize,
    pub links: Vec<f64>,
}

impl ModulusChain {
    /// `δ_i` for `1 ≤ i ≤ depth`.
    pub fn link(&self, i: usize) -> f64 {
        self.links[i - 1]
    }

    pub fn first(&self) -> f64 {
        self.links[0]
    }

    /// `2^{-N}`, the largest possible contribution of coordinates past `N`.
    pub fn tail_weight(&self) -> f64 {
        0.5f64.powi(self.depth as i32)
    }
}

fn check<S: System>(f: &S, delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("gap must be positive, got {delta}")));
    }
    if !f.is_continuous() {
        return Err(Error::Precondition("the map is not continuous".into()));
    }
    Ok(())
}

/// The chain used to match a pseudo-orbit coordinate by coordinate: `N` is the
/// least `N ≥ 2` with `2^{-N} < δ/2`, `δ_N = δ/4` and
/// `δ_i = min(ω(δ_{i+1}), δ_{i+1}/2)`.
pub fn modulus_chain<S: System>(f: &S, delta: f64) -> Result<ModulusChain> {
    check(f, delta)?;
    let mut depth = 2usize;
    while 0.5f64.powi(depth as i32) >= delta / 2.0 {
        depth += 1;
    }
    let mut links = vec![0.0; depth];
    links[depth - 1] = delta / 4.0;
    for i in (0..depth - 1).rev() {
        let next = links[i + 1];
        links[i] = f.modulus(next)?.min(next / 2.0);
    }
    Ok(ModulusChain { delta, depth, links })
}

/// Chain of prescribed depth for the `N`-step criterion:
/// `δ_N = ε/4` and `δ_i = min(ω(δ_{i+1}), δ_{i+1}) / 2`.
pub fn nstep_chain<S: System>(f: &S, eps: f64, depth: usize) -> Result<ModulusChain> {
    check(f, eps)?;
    if depth == 0 {
        return Err(Error::Domain("chain depth must be positive".into()));
    }
    let mut links = vec![0.0; depth];
    links[depth - 1] = eps / 4.0;
    for i in (0..depth - 1).rev() {
        let next = links[i + 1];
        links[i] = f.modulus(next)?.min(next) / 2.0;
    }
    Ok(ModulusChain { delta: eps, depth, links })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::space::{FiniteSet, FiniteSpace, Rational};
    use crate::svmap::{example_3_11, symmetrize, tent_family, Relation};

    fn line_relation() -> Relation {
        let pos: Vec<Rational> = (0..5).map(Rational::from).collect();
        let s = FiniteSpace::on_line(&pos).unwrap();
        Relation::new(
            s,
            vec![
                FiniteSet::new([1]),
                FiniteSet::new([2, 3]),
                FiniteSet::new([4]),
                FiniteSet::new([0, 4]),
                FiniteSet::new([2]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn depth_is_minimal() {
        let f = symmetrize(&tent_family(2.0).unwrap()).unwrap();
        for &(delta, n) in &[(0.5, 3usize), (0.3, 3), (0.1, 5), (1.0, 2)] {
            let c = modulus_chain(&f, delta).unwrap();
            assert_eq!(c.depth, n, "delta {delta}");
            assert!(c.tail_weight() < delta / 2.0);
            assert!(c.depth == 2 || 2.0 * c.tail_weight() >= delta / 2.0);
        }
    }

    #[test]
    fn links_are_increasing_and_small() {
        let f = line_relation();
        let c = modulus_chain(&f, 0.4).unwrap();
        for w in c.links.windows(2) {
            assert!(w[0] < w[1]);
        }
        for i in 1..c.depth {
            assert!(c.link(i) < 0.1);
        }
    }

    #[test]
    fn chain_validity_by_sampling() {
        let f = symmetrize(&tent_family(1.7).unwrap()).unwrap();
        let c = modulus_chain(&f, 0.2).unwrap();
        let mut rng = SeededRng::new(42);
        for i in 1..c.depth {
            for _ in 0..1000 {
                let x = f.sample(&mut rng);
                let y = f.perturb(x, c.link(i), &mut rng);
                assert!(f.image_hausdorff(x, y) < c.link(i + 1));
            }
        }
        let r = line_relation();
        let c = modulus_chain(&r, 0.9).unwrap();
        for i in 1..c.depth {
            for x in 0..r.len() {
                for y in 0..r.len() {
                    if r.dist(x, y) < c.link(i) {
                        assert!(r.image_hausdorff(x, y) < c.link(i + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn nstep_links_halve() {
        let f = symmetrize(&tent_family(2.0).unwrap()).unwrap();
        let c = nstep_chain(&f, 0.4, 8).unwrap();
        assert_eq!(c.links.len(), 8);
        assert_eq!(c.link(8), 0.1);
        for i in 1..8 {
            assert!(c.link(i) <= c.link(i + 1) / 2.0);
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(modulus_chain(&example_3_11(), 0.1), Err(Error::Precondition(_))));
        assert!(matches!(modulus_chain(&line_relation(), 0.0), Err(Error::Domain(_))));
        assert!(matches!(nstep_chain(&line_relation(), 0.1, 0), Err(Error::Domain(_))));
    }
}
