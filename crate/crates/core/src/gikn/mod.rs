//! Good approximations of periodic orbits, their projections to matches, and
//! towers of periodic orbits built from them.

mod approx;
mod cauchy;
mod projection;
mod synth;

pub use approx::{verify_good_approximation, verify_good_approximation_words, GoodApproximation};
pub use cauchy::{
    cyclic_blocks, exponent_decay, limit_quasi_orbit, min_intra_orbit_distance, support_blocks, verify_cauchy,
    verify_cauchy_with, CauchyReport, PairCheck, SeparationCheck,
};
pub use projection::{inductive_projection_match, projection_to_match, ProjectedMatch};
pub use synth::{cocycle_exponent, synthesize_gikn, GiknLevel, GiknSequence, SynthConfig};
