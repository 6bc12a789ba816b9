//! Deterministic 8-bit core whose per-cycle energy depends on the data it
//! processes: operand Hamming weights, result-bus switching, and the number of
//! active partial products in the multiplier.

mod bench;
mod isa;
mod machine;
mod power;
mod programs;

use thiserror::Error;

pub use bench::{
    run_benchmark, BenchStep, Benchmark, BenchmarkProgram, InputDataset, Layout, MEM_PORT,
};
pub use isa::{
    format_program, hamming_distance, hamming_weight, parse_program, partial_product_bits,
    Instruction, Opcode, Reg, NUM_REGS,
};
pub use machine::{measurement_noise, run_from_state, run_sequence, EnergyTrace, MachineState};
pub use power::{BaseCosts, PowerModelParams};
pub use programs::{
    mul_chain_program, mul_chain_with_passes, mul_map_range_ratio, mul_power_map, CHAIN_A,
    CHAIN_B, CHAIN_PASSES, CHAIN_RESULT,
};

#[derive(Debug, Error)]
pub enum IsaError {
    #[error("dataset has {actual} bytes, layout expects {expected}")]
    LayoutMismatch { expected: usize, actual: usize },
    #[error("unknown opcode `{0}`")]
    UnknownOpcode(String),
    #[error("bad register `{0}`")]
    BadRegister(String),
    #[error("cannot parse instruction `{0}`")]
    Syntax(String),
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("bad hex dataset: {0}")]
    BadHex(String),
    #[error("invalid power model: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
