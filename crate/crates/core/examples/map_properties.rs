//! Semicontinuity, openness and surjectivity of the built-in maps.
//!
//! Run with `cargo run --example map_properties`.

use svdyn::{example_3_11, symmetrize, tent_family};

fn main() -> svdyn::Result<()> {
    let maps = [
        ("example_3_11", example_3_11()),
        ("symmetrized tent c=2", symmetrize(&tent_family(2.0)?)?),
        ("symmetrized tent c=1.5", symmetrize(&tent_family(1.5)?)?),
    ];
    for (name, f) in &maps {
        let p = f.properties();
        println!(
            "{name:<24} usc={} lsc={} continuous={} open={} onto={}",
            p.usc, p.lsc, p.continuous, p.open, p.onto
        );
        for e in p.evidence.iter().filter(|e| !e.usc || !e.lsc) {
            println!("    breakpoint evidence: {e:?}");
        }
    }

    let tent = tent_family(2.0)?;
    println!("tent c=2 open onto its image: {}", tent.is_open_onto_image()?);
    let fiber = tent.fiber_map()?;
    println!("fiber map of tent c=2: usc={} lsc={}", fiber.is_usc(), fiber.is_lsc());
    Ok(())
}
