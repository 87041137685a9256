//! Birkhoff averages, bad-segment densities and matched-average deviations.

mod deviation;
mod function;
mod oxtoby;

pub use deviation::{matched_average_deviation, DeviationReport};
pub use function::{TestFunction, TestKind};
pub use oxtoby::{bad_segment_density, birkhoff_average, BadDensity};
