use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::{convolve, discretize, GriddedPdf, TAIL_MASS};
use super::ComposeError;
use crate::distfit::WeibullParams;
use crate::isa_sim::Opcode;

/// Unordered opcode pair; transitions are taken to be direction-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TransitionKey {
    lo: Opcode,
    hi: Opcode,
}

impl TransitionKey {
    pub fn new(a: Opcode, b: Opcode) -> Self {
        TransitionKey {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn ops(&self) -> (Opcode, Opcode) {
        (self.lo, self.hi)
    }
}

impl fmt::Display for TransitionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo.mnemonic(), self.hi.mnemonic())
    }
}

/// One row of the serialized table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub op_a: Opcode,
    pub op_b: Opcode,
    pub k: f64,
    pub mu: f64,
    pub sigma: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<TransitionEntry>", try_from = "Vec<TransitionEntry>")]
pub struct TransitionTable {
    entries: BTreeMap<TransitionKey, (WeibullParams, usize)>,
}

impl TransitionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: Opcode, b: Opcode, params: WeibullParams, n_samples: usize) {
        self.entries.insert(TransitionKey::new(a, b), (params, n_samples));
    }

    pub fn get(&self, a: Opcode, b: Opcode) -> Option<&WeibullParams> {
        self.entries.get(&TransitionKey::new(a, b)).map(|(p, _)| p)
    }

    pub fn n_samples(&self, a: Opcode, b: Opcode) -> Option<usize> {
        self.entries.get(&TransitionKey::new(a, b)).map(|e| e.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = TransitionKey> + '_ {
        self.entries.keys().copied()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ComposeError> {
        serde_json::from_str(s).map_err(|e| ComposeError::Format(e.to_string()))
    }
}

impl From<TransitionTable> for Vec<TransitionEntry> {
    fn from(t: TransitionTable) -> Self {
        t.entries
            .into_iter()
            .map(|(key, (p, n))| TransitionEntry {
                op_a: key.lo,
                op_b: key.hi,
                k: p.k,
                mu: p.mu,
                sigma: p.sigma,
                n_samples: n,
            })
            .collect()
    }
}

impl TryFrom<Vec<TransitionEntry>> for TransitionTable {
    type Error = String;

    fn try_from(rows: Vec<TransitionEntry>) -> Result<Self, String> {
        let mut t = TransitionTable::new();
        for r in rows {
            let p = WeibullParams::new(r.k, r.mu, r.sigma).map_err(|e| e.to_string())?;
            t.insert(r.op_a, r.op_b, p, r.n_samples);
        }
        Ok(t)
    }
}

/// Energy distribution of a straight-line sequence, built from the
/// transitions between its consecutive instructions alone.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePrediction {
    pub pdf: GriddedPdf,
    pub keys: Vec<TransitionKey>,
}

impl SequencePrediction {
    pub fn mean(&self) -> f64 {
        self.pdf.mean()
    }

    pub fn percentile(&self, prob: f64) -> Result<f64, ComposeError> {
        self.pdf.percentile(prob)
    }
}

pub fn percentile(pred: &SequencePrediction, prob: f64) -> Result<f64, ComposeError> {
    pred.percentile(prob)
}

fn lookup<'a>(table: &'a TransitionTable, a: Opcode, b: Opcode) -> Result<&'a WeibullParams, ComposeError> {
    table.get(a, b).ok_or(ComposeError::MissingTransition { op_a: a, op_b: b })
}

pub fn predict_sequence(
    opcodes: &[Opcode],
    table: &TransitionTable,
    grid_step: f64,
) -> Result<SequencePrediction, ComposeError> {
    if opcodes.len() < 2 {
        return Err(ComposeError::Domain("a sequence needs at least two instructions".into()));
    }
    let mut keys = Vec::with_capacity(opcodes.len() - 1);
    let mut pdf: Option<GriddedPdf> = None;
    for w in opcodes.windows(2) {
        let p = lookup(table, w[0], w[1])?;
        let g = discretize(p, grid_step)?;
        pdf = Some(match pdf {
            None => g,
            Some(acc) => convolve(&acc, &g),
        });
        keys.push(TransitionKey::new(w[0], w[1]));
    }
    Ok(SequencePrediction {
        pdf: pdf.expect("at least one transition"),
        keys,
    })
}

/// A grid fine enough that the narrowest transition of the sequence spans
/// 512 bins.
pub fn default_grid_step(opcodes: &[Opcode], table: &TransitionTable) -> Result<f64, ComposeError> {
    let mut narrowest = f64::INFINITY;
    for w in opcodes.windows(2) {
        let p = lookup(table, w[0], w[1])?;
        narrowest = narrowest.min(p.quantile(1.0 - TAIL_MASS)? - p.mu);
    }
    if !narrowest.is_finite() {
        return Err(ComposeError::Domain("a sequence needs at least two instructions".into()));
    }
    Ok(narrowest / 512.0)
}
