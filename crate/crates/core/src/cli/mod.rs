//! Experiment harness behind the `wcec-lab` binary. Each subcommand reads an
//! [`ExperimentConfig`], runs one experiment and writes CSV/JSON reports that
//! carry the seed and full config.

mod commands;
mod config;
mod histogram;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::compose::ComposeError;
use crate::distfit::DistError;

pub use commands::{
    bimodal_report, chain_energies, execute, read_fit, read_table, BimodalReport, FitFile, Meta, Percentiles,
};
pub use config::{ChainInputs, ExperimentConfig};
pub use histogram::{detect_modes, Histogram, ModeReport, MIN_MODE_BINS, PEAK_FRACTION, VALLEY_FRACTION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Command {
    Profile,
    Wcec,
    Ga,
    Patterns,
    Characterize,
    Predict,
    Bimodal,
    Mulmap,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Profile,
        Command::Wcec,
        Command::Ga,
        Command::Patterns,
        Command::Characterize,
        Command::Predict,
        Command::Bimodal,
        Command::Mulmap,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Profile => "profile",
            Command::Wcec => "wcec",
            Command::Ga => "ga",
            Command::Patterns => "patterns",
            Command::Characterize => "characterize",
            Command::Predict => "predict",
            Command::Bimodal => "bimodal",
            Command::Mulmap => "mulmap",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("histogram has {0} bins, mode detection needs at least 8")]
    TooFewBins(usize),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration and input problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Compose(ComposeError::MissingTransition { .. }) => 2,
            CliError::TooFewBins(_) | CliError::Dist(_) | CliError::Compose(_) => 3,
        }
    }
}

/// Loads `config`, applies the command-line overrides and runs `command`.
pub fn run(command: Command, config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<Vec<PathBuf>, CliError> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(dir) = out {
        cfg.out_dir = dir;
    }
    execute(command, &cfg)
}
