//! Energy of instruction sequences from pairwise transition distributions:
//! a gridded density algebra, the transition table, and the measurement
//! protocol that extracts transitions from simulated runs.

mod characterize;
mod grid;
mod table;

use thiserror::Error;

use crate::distfit::DistError;
use crate::isa_sim::Opcode;

pub use characterize::{
    build_transition_table, characterization_body, characterize_mov_mov, characterize_repeated,
    characterize_transition, measure_program, measure_sequence, sample_body, sequence_program,
    ProtocolConfig, MIN_MOV_SAMPLES,
};
pub use grid::{convolve, discretize, GriddedPdf, MIN_BINS, TAIL_MASS};
pub use table::{
    default_grid_step, percentile, predict_sequence, SequencePrediction, TransitionEntry,
    TransitionKey, TransitionTable,
};

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("grid too coarse: only {bins} occupied bins")]
    GridTooCoarse { bins: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no transition ({op_a}, {op_b}) in the table")]
    MissingTransition { op_a: Opcode, op_b: Opcode },
    #[error("residual variance {variance} is not positive")]
    NegativeResidualVariance { variance: f64 },
    #[error("characterizing ({op_a}, {op_b}): {source}")]
    Pair {
        op_a: Opcode,
        op_b: Opcode,
        #[source]
        source: Box<ComposeError>,
    },
    #[error("bad transition table: {0}")]
    Format(String),
    #[error(transparent)]
    Dist(#[from] DistError),
}
