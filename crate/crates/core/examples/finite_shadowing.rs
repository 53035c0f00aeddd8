//! Exact shadowing of a single pseudo-orbit on a three-point space.
//!
//! Run with `cargo run --example finite_shadowing`.

use svdyn::orbits::max_slack;
use svdyn::shadowing::decide_finite_shadowing;
use svdyn::{FiniteSpace, Rational, Relation};

fn main() -> svdyn::Result<()> {
    let space = FiniteSpace::on_line(&[Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 1)])?;
    // p0 -> p1 -> p2 -> p2
    let f = Relation::from_fn(space, &[1, 2, 2])?;
    let xs = [0, 2, 2];
    println!("pseudo-orbit {:?} has slack {}", xs, max_slack(&f, &xs));

    for eps in [0.5, 0.6] {
        let r = decide_finite_shadowing(&f, &xs, eps)?;
        println!("eps = {eps}: {:?}, witness {:?}, nodes {}", r.verdict, r.witness, r.nodes);
    }
    Ok(())
}
