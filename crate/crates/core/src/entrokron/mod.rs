//! Partitions and codings, block entropies, Katok triviality and the
//! loosely Kronecker diagnostic.

mod countable;
mod entropy;
mod katok;
mod partition;

pub use countable::{countable_alphabet_example, level_symbols, CountableExample, MAX_LEVEL};
pub use entropy::{block_entropy_rate, distribution_entropy, shannon_entropy, EntropyEstimate};
pub use katok::{katok_trivial, loosely_kronecker_diagnostic, KatokReport, KroneckerRow, MAX_WITNESS_CANDIDATES};
pub use partition::{code_sequence, faithful_thicken, partition_distance, Partition, Thickening, BOUNDARY_BAND};
