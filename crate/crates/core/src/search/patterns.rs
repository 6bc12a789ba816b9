use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::avg_power;
use crate::isa_sim::{Benchmark, InputDataset, Layout, PowerModelParams};
use crate::rng::{child_seed, seeded};

pub const STRIDES: [usize; 4] = [2, 4, 8, 16];
/// Random one-hot positions added to the fixed first, middle and last ones.
pub const SPARSE_RANDOM_POSITIONS: usize = 5;

/// A hand-crafted input. "One" means the element value 1; every bit set is
/// [`PatternSpec::AllOne`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "snake_case")]
pub enum PatternSpec {
    AllZero,
    AllOne,
    StridedOnes { stride: usize },
    StridedRandom { stride: usize },
    PatternBytes { byte: u8 },
    SparseOne { position: usize },
    /// `n` random bits above an `m`-bit offset in every element.
    RestrictedBits { n: u32, m: u32 },
    AllSame { value: u8 },
}

impl PatternSpec {
    pub fn id(&self) -> &'static str {
        match self {
            PatternSpec::AllZero => "all_zero",
            PatternSpec::AllOne => "all_one",
            PatternSpec::StridedOnes { .. } => "strided_ones",
            PatternSpec::StridedRandom { .. } => "strided_random",
            PatternSpec::PatternBytes { .. } => "pattern_bytes",
            PatternSpec::SparseOne { .. } => "sparse_one",
            PatternSpec::RestrictedBits { .. } => "restricted_bits",
            PatternSpec::AllSame { .. } => "all_same",
        }
    }

    /// Parameters as `key=value` pairs separated by `;`.
    pub fn params(&self) -> String {
        match *self {
            PatternSpec::AllZero | PatternSpec::AllOne => String::new(),
            PatternSpec::StridedOnes { stride } | PatternSpec::StridedRandom { stride } => {
                format!("stride={stride}")
            }
            PatternSpec::PatternBytes { byte } => format!("byte=0x{byte:02x}"),
            PatternSpec::SparseOne { position } => format!("position={position}"),
            PatternSpec::RestrictedBits { n, m } => format!("n={n};m={m}"),
            PatternSpec::AllSame { value } => format!("value={value}"),
        }
    }

    /// Builds the dataset; random content comes from `rng`.
    pub fn build<R: Rng + ?Sized>(&self, layout: Layout, rng: &mut R) -> InputDataset {
        let mut d = InputDataset::zeroed(layout);
        let count = layout.element_count();
        let full = if layout.element_bits() == 16 { u16::MAX } else { 0xff };
        match *self {
            PatternSpec::AllZero => {}
            PatternSpec::AllOne => d.bytes_mut().fill(0xff),
            PatternSpec::StridedOnes { stride } => {
                for i in (0..count).step_by(stride) {
                    d.set_element(i, 1);
                }
            }
            PatternSpec::StridedRandom { stride } => {
                for i in (0..count).step_by(stride) {
                    d.set_element(i, rng.random::<u16>() & full);
                }
            }
            PatternSpec::PatternBytes { byte } => d.bytes_mut().fill(byte),
            PatternSpec::SparseOne { position } => d.set_element(position, 1),
            PatternSpec::RestrictedBits { n, m } => {
                let mask = (((1u32 << n) - 1) << m) as u16;
                for i in 0..count {
                    d.set_element(i, rng.random::<u16>() & mask);
                }
            }
            PatternSpec::AllSame { value } => {
                for i in 0..count {
                    d.set_element(i, u16::from(value));
                }
            }
        }
        d
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.params() {
            p if p.is_empty() => f.write_str(self.id()),
            p => write!(f, "{}({p})", self.id()),
        }
    }
}

/// The full hand-crafted suite for `layout`; `seed` fixes the random
/// one-hot positions and all random contents.
pub fn generate_patterns(layout: Layout, seed: u64) -> Vec<(PatternSpec, InputDataset)> {
    let count = layout.element_count();
    let bits = layout.element_bits();
    let mut specs = vec![PatternSpec::AllZero, PatternSpec::AllOne];
    specs.extend(STRIDES.iter().map(|&stride| PatternSpec::StridedOnes { stride }));
    specs.extend(STRIDES.iter().map(|&stride| PatternSpec::StridedRandom { stride }));
    specs.extend([0xaa, 0x55].map(|byte| PatternSpec::PatternBytes { byte }));

    let mut positions = vec![0, count / 2, count - 1];
    let mut pos_rng = seeded(seed, 1);
    let extra: Vec<usize> = sample(&mut pos_rng, count, count)
        .into_iter()
        .filter(|p| !positions.contains(p))
        .take(SPARSE_RANDOM_POSITIONS)
        .collect();
    positions.extend(extra);
    specs.extend(positions.iter().map(|&position| PatternSpec::SparseOne { position }));

    for n in 1..=bits {
        for m in 0..=bits - n {
            specs.push(PatternSpec::RestrictedBits { n, m });
        }
    }
    specs.extend((0..=255u8).map(|value| PatternSpec::AllSame { value }));

    specs
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let d = s.build(layout, &mut seeded(child_seed(seed, i as u64), 2));
            (s, d)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub spec: PatternSpec,
    /// mW.
    pub avg_power: f64,
}

/// One simulation per pattern of the suite.
pub fn pattern_sweep(benchmark: Benchmark, params: &PowerModelParams, seed: u64) -> Vec<PatternResult> {
    let prog = benchmark.compile();
    let patterns = generate_patterns(benchmark.layout(), seed);
    patterns
        .par_iter()
        .enumerate()
        .map(|(i, (spec, data))| PatternResult {
            spec: *spec,
            avg_power: avg_power(&prog, data, params, child_seed(seed ^ 0x7061_7474, i as u64)),
        })
        .collect()
}

pub fn sweep_csv(results: &[PatternResult]) -> String {
    let mut out = String::from("pattern_id,params,avg_power_mW\n");
    for r in results {
        out.push_str(&format!("{},{},{}\n", r.spec.id(), r.spec.params(), r.avg_power));
    }
    out
}
