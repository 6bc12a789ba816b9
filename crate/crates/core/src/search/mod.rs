//! Input-data search: random profiling, a genetic algorithm over raw input
//! bytes, and the hand-crafted pattern suite.

mod ga;
mod patterns;
mod profile;

use thiserror::Error;

pub use ga::{ga_optimize, ga_optimize_from, GaConfig, GaResult, GenerationStats, Objective};
pub use patterns::{
    generate_patterns, pattern_sweep, sweep_csv, PatternResult, PatternSpec, SPARSE_RANDOM_POSITIONS,
    STRIDES,
};
pub use profile::{random_dataset, random_profile};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}
