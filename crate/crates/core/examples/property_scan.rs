//! Decides the shadowing property on a finite system and finds the largest
//! admissible slack for several tolerances.
//!
//! Run with `cargo run --example property_scan`.

use svdyn::shadowing::{decide_shadowing_property, delta_candidates, delta_star, PropertyLimits};
use svdyn::{FiniteSpace, Rational, Relation};

fn main() -> svdyn::Result<()> {
    let space = FiniteSpace::on_line(&[Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 1)])?;
    let f = Relation::from_fn(space, &[1, 2, 2])?;
    let limits = PropertyLimits::default();

    for eps in [0.3, 0.6, 1.0] {
        println!("eps = {eps}: delta* = {}", delta_star(&f, eps, limits)?);
        for delta in delta_candidates(&f, eps) {
            let r = decide_shadowing_property(&f, eps, delta, limits)?;
            match r.counterexample {
                Some(c) => println!("    delta = {delta}: {:?}, shortest counterexample {c:?}", r.verdict),
                None => println!("    delta = {delta}: {:?} ({} states)", r.verdict, r.nodes),
            }
        }
    }
    Ok(())
}
