//! Shared fixtures and brute-force oracles for the integration tests.
#![allow(dead_code)]

use svdyn::space::{FiniteSet, FiniteSpace, Rational};
use svdyn::svmap::{Relation, System};
use svdyn::SeededRng;

pub fn line3() -> FiniteSpace {
    FiniteSpace::on_line(&[Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 1)]).unwrap()
}

/// `p0 → p1 → p2 → p2` on `{0, 1/2, 1}`.
pub fn finite_line() -> Relation {
    Relation::from_fn(line3(), &[1, 2, 2]).unwrap()
}

/// `p0 → p1 → p2 → p0` on `{0, 1/2, 1}`.
pub fn cycle() -> Relation {
    Relation::from_fn(line3(), &[1, 2, 0]).unwrap()
}

/// Two swapped pairs on `{0, 1/3, 2/3, 1}`.
pub fn permutation() -> Relation {
    let s = FiniteSpace::on_line(&[
        Rational::new(0, 1),
        Rational::new(1, 3),
        Rational::new(2, 3),
        Rational::new(1, 1),
    ])
    .unwrap();
    Relation::from_fn(s, &[1, 0, 3, 2]).unwrap()
}

pub fn full() -> Relation {
    Relation::full(line3())
}

pub fn identity2() -> Relation {
    Relation::identity(FiniteSpace::on_line(&[Rational::new(0, 1), Rational::new(1, 1)]).unwrap())
}

pub fn thirds() -> [Rational; 3] {
    [Rational::new(1, 3), Rational::new(2, 3), Rational::new(1, 1)]
}

/// Every metric on `n` labeled points with distances in `{1/3, 2/3, 1}`.
pub fn all_metrics(n: usize) -> Vec<FiniteSpace> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for code in 0..3usize.pow(pairs.len() as u32) {
        let mut table = vec![vec![Rational::new(0, 1); n]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let d = thirds()[(code / 3usize.pow(k as u32)) % 3];
            table[i][j] = d;
            table[j][i] = d;
        }
        if let Ok(s) = FiniteSpace::new(FiniteSpace::default_labels(n), table) {
            out.push(s);
        }
    }
    out
}

/// Every total relation on `n` points.
pub fn all_relations(space: &FiniteSpace) -> Vec<Relation> {
    let n = space.len();
    let per = (1usize << n) - 1;
    (0..per.pow(n as u32))
        .map(|code| {
            let images = (0..n)
                .map(|i| {
                    let mask = (code / per.pow(i as u32)) % per + 1;
                    FiniteSet::new((0..n).filter(|b| mask & (1 << b) != 0))
                })
                .collect();
            Relation::new(space.clone(), images).unwrap()
        })
        .collect()
}

/// A seeded metric with distances in `{1/3, 2/3, 1}` and a seeded total
/// relation on `n` points.
pub fn random_system(n: usize, rng: &mut SeededRng) -> Relation {
    let space = loop {
        let mut table = vec![vec![Rational::new(0, 1); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let d = *rng.choose(&thirds());
                table[i][j] = d;
                table[j][i] = d;
            }
        }
        if let Ok(s) = FiniteSpace::new(FiniteSpace::default_labels(n), table) {
            break s;
        }
    };
    let images = (0..n)
        .map(|_| {
            let mask = 1 + rng.below((1 << n) - 1);
            FiniteSet::new((0..n).filter(|b| mask & (1 << b) != 0))
        })
        .collect();
    Relation::new(space, images).unwrap()
}

/// A seeded system on `n` points of the line with positions in `{0, …, 12}/12`.
pub fn random_line_system(n: usize, rng: &mut SeededRng) -> Relation {
    let mut pos: Vec<i64> = Vec::new();
    while pos.len() < n {
        let p = rng.below(13) as i64;
        if !pos.contains(&p) {
            pos.push(p);
        }
    }
    let space = FiniteSpace::on_line(&pos.iter().map(|&p| Rational::new(p, 12)).collect::<Vec<_>>()).unwrap();
    let images = (0..n)
        .map(|_| {
            let k = 1 + rng.below(2);
            FiniteSet::new((0..k).map(|_| rng.below(n)))
        })
        .collect();
    Relation::new(space, images).unwrap()
}

/// Smallest `max_i d(y_i, x_i)` over all orbits `y` of the same length.
pub fn naive_shadow_threshold(f: &Relation, xs: &[usize]) -> f64 {
    fn go(f: &Relation, xs: &[usize], y: usize, i: usize, worst: f64, best: &mut f64) {
        let worst = worst.max(f.dist(y, xs[i]));
        if worst >= *best {
            return;
        }
        if i + 1 == xs.len() {
            *best = worst;
            return;
        }
        for z in f.image(y) {
            go(f, xs, z, i + 1, worst, best);
        }
    }
    let mut best = f64::INFINITY;
    for y in 0..f.len() {
        go(f, xs, y, 0, 0.0, &mut best);
    }
    best
}

/// Some orbit stays strictly within `eps` of `xs`.
pub fn naive_shadowed(f: &Relation, xs: &[usize], eps: f64) -> bool {
    fn go(f: &Relation, xs: &[usize], y: usize, i: usize, eps: f64) -> bool {
        if !(f.dist(y, xs[i]) < eps) {
            return false;
        }
        i + 1 == xs.len() || f.image(y).into_iter().any(|z| go(f, xs, z, i + 1, eps))
    }
    (0..f.len()).any(|y| go(f, xs, y, 0, eps))
}

/// Every δ-pseudo-orbit of length at most `max_len` is ε-shadowed.
pub fn naive_property(f: &Relation, eps: f64, delta: f64, max_len: usize) -> bool {
    fn go(f: &Relation, seq: &mut Vec<usize>, eps: f64, delta: f64, max_len: usize) -> bool {
        if !naive_shadowed(f, seq, eps) {
            return false;
        }
        if seq.len() == max_len {
            return true;
        }
        let last = *seq.last().unwrap();
        for y in 0..f.len() {
            if f.slack(y, last) < delta {
                seq.push(y);
                let ok = go(f, seq, eps, delta, max_len);
                seq.pop();
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    (0..f.len()).all(|x| go(f, &mut vec![x], eps, delta, max_len))
}

/// All sequences over `0..n` with lengths `1..=max_len`.
pub fn all_sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0..n).map(|x| vec![x]).collect();
    let mut frontier = out.clone();
    for _ in 1..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s| {
                (0..n).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Positive distinct distances and one value above the diameter.
pub fn eps_grid(f: &Relation) -> Vec<f64> {
    let mut v: Vec<f64> = f.space().distinct_distances().into_iter().map(svdyn::space::rational_to_f64).collect();
    v.push(1.5);
    v
}
