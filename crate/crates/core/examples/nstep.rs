//! The N-step construction on a tent-map pseudo-orbit.
//!
//! Run with `cargo run --example nstep`.

use svdyn::orbits::generate_pseudo_orbit;
use svdyn::shadowing::nstep_criterion;
use svdyn::{symmetrize, tent_family};

fn main() -> svdyn::Result<()> {
    let f = symmetrize(&tent_family(2.0)?)?;
    let eps = 0.2;
    let depth = 4;
    let pseudo = generate_pseudo_orbit(&f, 1e-7, 20, 4)?;
    let r = nstep_criterion(&f, &pseudo.points, eps, depth)?;
    println!("chain for N = {depth}: links {:?}", r.chain.links);
    println!("max gap {:.3e}, condition {}, chain bounds {}", r.max_gap, r.condition, r.chain_bounds);
    println!("variants: a={} b={} c={}", r.variant_a, r.variant_b, r.variant_c);
    Ok(())
}
