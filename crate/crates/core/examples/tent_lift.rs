//! Lifts a tent-map pseudo-orbit into the orbit space, shadows it there and
//! transfers the witness back down.
//!
//! Run with `cargo run --example tent_lift`.

use svdyn::lifting::{lift_pseudo_orbit, shadow_in_shift, transfer_shadowing_down};
use svdyn::orbits::generate_pseudo_orbit;
use svdyn::{modulus_chain, symmetrize, tent_family};

fn main() -> svdyn::Result<()> {
    let f = symmetrize(&tent_family(2.0)?)?;
    let delta = 0.1;
    let eps = 0.2;
    let d1 = modulus_chain(&f, delta)?.first();
    let pseudo = generate_pseudo_orbit(&f, d1, 10, 7)?;
    println!("pseudo-orbit: {:.4?}", pseudo.points);

    let (lifted, report) = lift_pseudo_orbit(&f, &pseudo.points, delta, Some(16))?;
    println!("chain links {:?}", report.chain.links);
    println!("lift errors within bounds: {} (depth {})", report.satisfied, report.depth);

    match shadow_in_shift(&f, &lifted, eps)? {
        Some((witness, worst)) => {
            println!("shift witness heads: {:.4?} (worst rho {worst:.3e})", &witness.points[..pseudo.len()]);
            let down = transfer_shadowing_down(&f, &witness.points, &pseudo.points, eps)?;
            println!("base orbit within 2 eps: {:.4?}", down.points);
        }
        None => println!("no shift witness found at eps = {eps}"),
    }
    Ok(())
}
