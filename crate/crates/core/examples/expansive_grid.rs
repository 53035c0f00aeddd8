//! Quantizes a set-valued interval map onto a grid and certifies
//! expansiveness of the resulting relation.
//!
//! Run with `cargo run --release --example expansive_grid`.

use svdyn::example_3_11;
use svdyn::expansive::{certify_quantized, check_expansive_lift, max_certified_delta, quantize};

fn main() -> svdyn::Result<()> {
    let f = example_3_11();
    for h in [2.0 / 64.0, 2.0 / 128.0, 2.0 / 256.0] {
        let cert = certify_quantized(&f, h, 0.1)?;
        println!(
            "h = {h:.5}: {:?} at delta = 0.1 ({} pairs, {} survive)",
            cert.verdict, cert.product_nodes, cert.surviving_nodes
        );
        let q = quantize(&f, h)?;
        println!("    largest certified delta: {:?}", max_certified_delta(&q)?);
    }

    let lift = check_expansive_lift(&f, 0.1, 500, 24, 5)?;
    println!(
        "orbit-space check: {} separated, {} equal heads, {} inconclusive, {} violations, horizon {}",
        lift.separated, lift.equal_heads, lift.inconclusive, lift.violations, lift.max_horizon
    );
    Ok(())
}
