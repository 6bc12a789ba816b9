//! Probabilistic worst-case energy analysis.
//!
//! * [`isa_sim`]: data-dependent instruction-level energy simulator.
//! * [`distfit`]: Weibull model, fitting, and probabilistic maxima.
//! * [`compose`]: gridded densities, convolution, and transition tables.
//! * [`search`]: random profiling, genetic search, and crafted input patterns.
//! * [`cli`]: experiment drivers behind the `wcec-lab` binary.

pub mod cli;
pub mod compose;
pub mod distfit;
pub mod isa_sim;
pub mod rng;
pub mod search;
