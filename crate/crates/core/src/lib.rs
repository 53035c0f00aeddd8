//! Set-valued discrete dynamics on compact metric spaces.
//!
//! The crate models maps `F : X -> 2^X` on finite metric spaces and on
//! finite unions of real intervals, and provides:
//!
//! * exact and numeric shadowing decisions ([`shadowing`]);
//! * pseudo-orbits, orbit spaces and the metric `ρ` on them ([`orbits`]);
//! * constructive lifting of pseudo-orbits into orbit spaces and back
//!   ([`lifting`]);
//! * expansiveness certificates and grid quantization ([`expansive`]).
//!
//! Distances are normalized so that the carrier has diameter 1.

pub mod cli;
pub mod error;
pub mod expansive;
pub mod lifting;
pub mod orbits;
pub mod rng;
pub mod shadowing;
pub mod space;
pub mod svmap;

pub use error::{Error, Result};
pub use rng::SeededRng;
pub use space::{
    CompactSet, FiniteSet, FiniteSpace, IntervalSet, IntervalSpace, MetricSpace, Point, Rational,
    TOL,
};
pub use svmap::{
    example_3_11, modulus_chain, symmetrize, tent_family, PiecewiseMap, Relation, SetValuedMap,
    System,
};
