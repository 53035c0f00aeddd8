//! Shadowing for the inverse map and lifting through the inverse.
//!
//! Run with `cargo run --example inverse_shadowing`.

use svdyn::lifting::{inverse_slack, lift_inv, shadow_inverse};
use svdyn::{FiniteSpace, Rational, Relation};

fn main() -> svdyn::Result<()> {
    let space = FiniteSpace::on_line(&[
        Rational::new(0, 1),
        Rational::new(1, 3),
        Rational::new(2, 3),
        Rational::new(1, 1),
    ])?;
    // two swapped pairs; the inverse is the same relation
    let f = Relation::from_fn(space, &[1, 0, 3, 2])?;
    let delta = 0.25;
    println!("inverse slack for delta = {delta}: {}", inverse_slack(&f, delta)?);

    let xs = [0, 1, 0, 1, 0, 1];
    let r = shadow_inverse(&f, &xs, 0.25, delta)?;
    println!("{:?}: witness {:?}, max distance {:?}", r.verdict, r.witness, r.max_distance);

    let (lifted, report) = lift_inv(&f, &xs[..4], delta, Some(8))?;
    for (i, u) in lifted.iter().enumerate() {
        println!("    lifted point {i}: {:?}", u.prefix);
    }
    println!("bounds satisfied: {}", report.satisfied);
    Ok(())
}
