//! Experiment runner and command-line plumbing on top of `fkdyn-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod inputs;

pub use config::{ExperimentConfig, Params};
pub use error::{CliError, Result};
pub use experiments::{run_experiment, Check, Relation, Summary, REGISTRY};
