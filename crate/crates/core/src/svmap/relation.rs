use std::cmp::Ordering;

use num_traits::Zero;

use super::System;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::space::{rational_from_f64, rational_to_f64, FiniteSet, FiniteSpace, Rational};

/// A total relation on a finite metric space: every point has a nonempty
/// image. The discrete topology makes every such map continuous and open.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    space: FiniteSpace,
    images: Vec<FiniteSet>,
}

impl Relation {
    pub fn new(space: FiniteSpace, images: Vec<FiniteSet>) -> Result<Self> {
        if images.len() != space.len() {
            return Err(Error::Construction(format!(
                "relation lists {} images for {} points",
                images.len(),
                space.len()
            )));
        }
        for (x, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::Construction(format!(
                    "point {} has an empty image",
                    space.label(x)
                )));
            }
            for y in img.iter() {
                space.check(y)?;
            }
        }
        Ok(Relation { space, images })
    }

    /// Single-valued relation from a successor table.
    pub fn from_fn(space: FiniteSpace, succ: &[usize]) -> Result<Self> {
        Relation::new(space, succ.iter().map(|&y| FiniteSet::singleton(y)).collect())
    }

    pub fn full(space: FiniteSpace) -> Self {
        let all = space.all();
        let images = vec![all; space.len()];
        Relation { space, images }
    }

    pub fn identity(space: FiniteSpace) -> Self {
        let images = (0..space.len()).map(FiniteSet::singleton).collect();
        Relation { space, images }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn images(&self) -> &[FiniteSet] {
        &self.images
    }

    pub fn eval(&self, x: usize) -> Result<&FiniteSet> {
        self.space.check(x)?;
        Ok(&self.images[x])
    }

    pub fn eval_set(&self, a: &FiniteSet) -> Result<FiniteSet> {
        if a.is_empty() {
            return Err(Error::Domain("image of an empty set".into()));
        }
        let mut out = Vec::new();
        for x in a.iter() {
            out.extend(self.eval(x)?.iter());
        }
        Ok(FiniteSet::new(out))
    }

    /// `{x : F(x) ∩ A ≠ ∅}`.
    pub fn preimage(&self, a: &FiniteSet) -> Result<FiniteSet> {
        for y in a.iter() {
            self.space.check(y)?;
        }
        Ok((0..self.len()).filter(|&x| self.images[x].iter().any(|y| a.contains(y))).collect())
    }

    /// First point not lying in any image, if any.
    pub fn missing_from_images(&self) -> Option<usize> {
        let mut hit = vec![false; self.len()];
        for img in &self.images {
            for y in img.iter() {
                hit[y] = true;
            }
        }
        hit.iter().position(|h| !h)
    }

    pub fn is_onto(&self) -> bool {
        self.missing_from_images().is_none()
    }

    /// The inverse relation `y ↦ {x : y ∈ F(x)}`; requires `F` onto.
    pub fn invert(&self) -> Result<Relation> {
        if let Some(y) = self.missing_from_images() {
            return Err(Error::Precondition(format!(
                "map is not onto: {} has an empty preimage",
                self.space.label(y)
            )));
        }
        let mut images = vec![Vec::new(); self.len()];
        for (x, img) in self.images.iter().enumerate() {
            for y in img.iter() {
                images[y].push(x);
            }
        }
        Ok(Relation {
            space: self.space.clone(),
            images: images.into_iter().map(FiniteSet::new).collect(),
        })
    }

    /// Relational composition: `x ↦ G(F(x))`.
    pub fn then(&self, g: &Relation) -> Result<Relation> {
        if g.space != self.space {
            return Err(Error::Domain("composition needs a shared carrier".into()));
        }
        let images = self
            .images
            .iter()
            .map(|img| g.eval_set(img))
            .collect::<Result<Vec<_>>>()?;
        Ok(Relation { space: self.space.clone(), images })
    }

    /// `n`-fold composition; `iterate(0)` is the identity relation.
    pub fn iterate(&self, n: i64) -> Result<Relation> {
        if n < 0 {
            return Err(Error::Domain("iteration count must be nonnegative".into()));
        }
        let mut acc = Relation::identity(self.space.clone());
        for _ in 0..n {
            acc = acc.then(self)?;
        }
        Ok(acc)
    }

    /// Exact slack `d(y, F(x))`.
    pub fn exact_slack(&self, y: usize, x: usize) -> Rational {
        self.images[x].iter().map(|z| self.space.dist(y, z)).min().unwrap_or_else(Rational::zero)
    }

    /// Sorted distinct positive slacks `d(y, F(x))` over all pairs.
    pub fn positive_slacks(&self) -> Vec<Rational> {
        let mut v = Vec::new();
        for x in 0..self.len() {
            for y in 0..self.len() {
                let s = self.exact_slack(y, x);
                if !s.is_zero() {
                    v.push(s);
                }
            }
        }
        v.sort();
        v.dedup();
        v
    }

    pub fn exact_image_hausdorff(&self, x: usize, y: usize) -> Rational {
        self.space
            .hausdorff(&self.images[x], &self.images[y])
            .expect("images are nonempty")
    }

    /// Largest `w` with `d(x,y) < w  =>  d_H(F(x),F(y)) < eta`, found by
    /// scanning every pair. Returns 2 (beyond the diameter) when no pair
    /// violates the bound.
    pub fn exact_modulus(&self, eta: Rational) -> Result<Rational> {
        if eta <= Rational::zero() {
            return Err(Error::Domain("modulus needs a positive target".into()));
        }
        let mut best = Rational::from_integer(2);
        for x in 0..self.len() {
            for y in (x + 1)..self.len() {
                if self.exact_image_hausdorff(x, y) >= eta {
                    best = best.min(self.space.dist(x, y));
                }
            }
        }
        Ok(best)
    }
}

impl System for Relation {
    type Point = usize;

    fn dist(&self, x: usize, y: usize) -> f64 {
        rational_to_f64(self.space.dist(x, y))
    }

    fn image(&self, x: usize) -> Vec<usize> {
        self.images[x].ids().to_vec()
    }

    fn lt(&self, value: f64, bound: f64) -> bool {
        value < bound
    }

    fn is_member(&self, y: usize, x: usize) -> bool {
        self.images[x].contains(y)
    }

    fn order(&self, a: usize, b: usize) -> Ordering {
        a.cmp(&b)
    }

    fn sample(&self, rng: &mut SeededRng) -> usize {
        rng.below(self.len())
    }

    fn perturb(&self, z: usize, delta: f64, rng: &mut SeededRng) -> usize {
        let near: Vec<usize> = (0..self.len()).filter(|&y| self.dist(y, z) < delta).collect();
        *rng.choose(&near)
    }

    fn modulus(&self, eta: f64) -> Result<f64> {
        Ok(rational_to_f64(self.exact_modulus(rational_from_f64(eta)?)?))
    }

    fn is_continuous(&self) -> bool {
        true
    }

    fn is_onto(&self) -> bool {
        Relation::is_onto(self)
    }

    fn slack(&self, y: usize, x: usize) -> f64 {
        rational_to_f64(self.exact_slack(y, x))
    }

    fn image_hausdorff(&self, x: usize, y: usize) -> f64 {
        rational_to_f64(self.exact_image_hausdorff(x, y))
    }
}
