//! Seeded, splittable pseudo-random numbers.
//!
//! The generator is SplitMix64. Derived draws are fixed so that other
//! implementations can reproduce every generated pseudo-orbit:
//!
//! * `uniform()` is `(next_u64() >> 11) * 2^-53`, a float in `[0, 1)`;
//! * `below(n)` is the high 64 bits of `next_u64() * n` (128-bit product);
//! * `stream(seed, k)` seeds a fresh generator with the `k`-th output of a
//!   generator seeded with `seed ^ 0x9E37_79B9_7F4A_7C15`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: SplitMix64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { inner: SplitMix64::seed_from_u64(seed) }
    }

    /// Independent generator number `index` derived from `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        let mut root = SeededRng::new(seed ^ 0x9E37_79B9_7F4A_7C15);
        let mut out = 0;
        for _ in 0..=index {
            out = root.next_u64();
        }
        SeededRng::new(out)
    }

    /// Splits off a child generator, advancing `self` by one draw.
    pub fn split(&mut self) -> Self {
        SeededRng::new(self.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn choose<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len())]
    }
}
