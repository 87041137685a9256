//! Feldman-Katok pseudometric machinery for orbit sequences, and the GIKN
//! construction of periodic-orbit towers.
//!
//! The crate is organised around six layers:
//!
//! * [`seqcore`]: metric systems (full shifts, circle rotations, countable
//!   alphabet products), orbit segments, periodic orbits and quasi-orbits.
//! * [`matchkit`]: `(n, δ)`-matches, gaps, `f̄_δ` for periodic pairs, the
//!   Feldman-Katok distance, Besicovitch pseudometrics and word metrics.
//! * [`measurekit`]: empirical measures, exact Prokhorov distance on finite
//!   supports, block distributions and transportation distances.
//! * [`gikn`]: good approximations, the projection-to-match constructor,
//!   tower synthesis with scalar cocycles, and Cauchy verification.
//! * [`ergodiag`]: Birkhoff averages and bad-segment density diagnostics.
//! * [`entrokron`]: partitions, block entropy, Katok triviality and the
//!   loosely Kronecker diagnostic.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is what the CLI uses.

pub mod entrokron;
pub mod ergodiag;
pub mod error;
pub mod gikn;
pub mod matchkit;
pub mod measurekit;
pub mod scalar;
pub mod seqcore;

pub use error::{FkError, Result};
pub use scalar::Scalar;

pub use seqcore::{
    CircleRotation, CountableProduct, FullShift, MetricSystem, PeriodicOrbit, PointKind, PointSeq,
    QuasiOrbit, RealLine, SymbolicPoint,
};

/// Default scalar used by the CLI and the experiments.
pub type Real = f64;

pub type Match64 = matchkit::Match<f64>;
pub type GapValue64 = matchkit::GapValue<f64>;
pub type BlockDistribution64 = measurekit::BlockDistribution<f64>;
pub type Coupling64 = measurekit::Coupling<f64>;
pub type GiknSequence64 = gikn::GiknSequence<f64>;
pub type GoodApproximation64 = gikn::GoodApproximation<f64>;
pub type TestFunction64<P> = ergodiag::TestFunction<P, f64>;
pub type EntropyEstimate64 = entrokron::EntropyEstimate<f64>;
pub type Match32 = matchkit::Match<f32>;
pub type GapValue32 = matchkit::GapValue<f32>;
