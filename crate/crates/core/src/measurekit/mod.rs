//! Empirical measures, the exact Prokhorov distance, block distributions and
//! transportation distances between them.

mod blocks;
mod flow;
mod measure;
mod prokhorov;
mod transport;

pub use blocks::{block_distribution, BlockDistribution, BlockSource, ProductSpec, MAX_PRODUCT_BLOCKS};
pub use flow::FlowNetwork;
pub use measure::{empirical_measure, DiscreteMeasure};
pub use prokhorov::{prokhorov, MAX_SUPPORT};
pub use transport::{
    solve_transport, transport_block_distance, CostKind, Coupling, TransportResult, TransportSolution, MAX_COST_ENTRIES,
};
