use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::isa_sim::{Benchmark, Opcode, PowerModelParams};
use crate::search::GaConfig;

/// Which multiply-chain inputs the bimodal experiment draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainInputs {
    #[default]
    All,
    OddOdd,
    EvenA,
}

/// One experiment, read from a JSON file. Every field has a default; the
/// `power` block only needs the coefficients it overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    pub power: PowerModelParams,
    pub seed: u64,
    /// Simulated runs for profiles, characterization bodies and chain inputs.
    pub runs: usize,
    pub ga: GaConfig,
    /// Opcode set to characterize.
    pub opcodes: Vec<Opcode>,
    /// Inline opcode sequence for `predict`, used when no sequence file is set.
    pub sequence: Vec<Opcode>,
    pub sequence_file: Option<PathBuf>,
    pub transitions_file: Option<PathBuf>,
    pub fit_file: Option<PathBuf>,
    pub grid_step: Option<f64>,
    pub chain_inputs: ChainInputs,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            benchmark: Benchmark::MATMULT,
            power: PowerModelParams::default(),
            seed: 0,
            runs: 10_000,
            ga: GaConfig::default(),
            opcodes: vec![Opcode::Mov, Opcode::Add, Opcode::Mul],
            sequence: Vec::new(),
            sequence_file: None,
            transitions_file: None,
            fit_file: None,
            grid_step: None,
            chain_inputs: ChainInputs::All,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    /// Reads a config and resolves its relative paths against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.sequence_file,
            &mut cfg.transitions_file,
            &mut cfg.fit_file,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.runs == 0 {
            return Err(CliError::Config("runs must be at least 1".into()));
        }
        self.power
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.ga.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(step) = self.grid_step {
            if !(step.is_finite() && step > 0.0) {
                return Err(CliError::Config(format!("grid_step {step} must be positive")));
            }
        }
        for p in [&self.sequence_file, &self.transitions_file, &self.fit_file]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return Err(CliError::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
