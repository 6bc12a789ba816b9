use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ComposeError, TransitionTable};
use crate::distfit::{
    moments, standard_skewness, weibull_from_moments, DistError, EmpiricalSample, Unit, WeibullParams,
    SHAPE_RANGE,
};
use crate::isa_sim::{run_from_state, Instruction, MachineState, Opcode, PowerModelParams};
use crate::rng::{child_seed, seeded};

/// Smallest four-mov sample accepted by [`characterize_mov_mov`].
pub const MIN_MOV_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProtocolConfig {
    /// Simulated runs per characterized body.
    pub runs: usize,
    pub seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            runs: 10_000,
            seed: 0,
        }
    }
}

/// Recovers one transition from a sample of sums.
///
/// The sample is modelled as `multiplicity` copies of the unknown plus one
/// draw of each `known` distribution, all independent. Cumulants add under
/// independence, so the unknown's first three cumulants are the sample's
/// minus the known ones, divided by the multiplicity.
///
/// The residual third cumulant is a small difference of large noisy terms, so
/// its skewness is clamped into the range a Weibull can attain.
pub fn characterize_repeated(
    sample: &EmpiricalSample,
    known: &[WeibullParams],
    multiplicity: usize,
) -> Result<WeibullParams, ComposeError> {
    let (mean, var, skew) = residual_moments(sample, known, multiplicity)?;
    let (lo, hi) = (standard_skewness(SHAPE_RANGE.1), standard_skewness(SHAPE_RANGE.0));
    Ok(weibull_from_moments(mean, var, skew.clamp(lo, hi))?)
}

fn residual_moments(
    sample: &EmpiricalSample,
    known: &[WeibullParams],
    multiplicity: usize,
) -> Result<(f64, f64, f64), ComposeError> {
    if multiplicity == 0 {
        return Err(ComposeError::Domain("multiplicity must be at least one".into()));
    }
    let m = moments(sample)?;
    let n = multiplicity as f64;
    let mean = (m.mean - known.iter().map(|p| p.mean()).sum::<f64>()) / n;
    let var = (m.variance - known.iter().map(|p| p.variance()).sum::<f64>()) / n;
    let third = (m.third_central() - known.iter().map(|p| p.third_central_moment()).sum::<f64>()) / n;
    if !(var > 0.0) {
        return Err(ComposeError::NegativeResidualVariance { variance: var });
    }
    Ok((mean, var, third / var.powf(1.5)))
}

pub fn characterize_transition(
    sample: &EmpiricalSample,
    known: &[WeibullParams],
) -> Result<WeibullParams, ComposeError> {
    characterize_repeated(sample, known, 1)
}

/// Single mov-to-mov transition from a sample of four-mov totals.
pub fn characterize_mov_mov(sample: &EmpiricalSample) -> Result<WeibullParams, ComposeError> {
    if sample.len() < MIN_MOV_SAMPLES {
        return Err(DistError::InsufficientData {
            needed: MIN_MOV_SAMPLES,
            got: sample.len(),
        }
        .into());
    }
    let (mean, var, skew) = residual_moments(sample, &[], 4)?;
    Ok(weibull_from_moments(mean, var, skew)?)
}

/// Four-instruction measurement body: destinations alternate between r2 and
/// r3, and every instruction reads its own source register.
pub fn characterization_body(ops: [Opcode; 4]) -> Vec<Instruction> {
    ops.iter()
        .enumerate()
        .map(|(p, &op)| Instruction::rr(op, 2 + (p % 2) as u8, 10 + p as u8))
        .collect()
}

/// Total energy of `body` over `cfg.runs` runs, each from a freshly
/// randomized register file and bus.
pub fn sample_body(body: &[Instruction], params: &PowerModelParams, cfg: &ProtocolConfig) -> EmpiricalSample {
    sample_runs(body, params, cfg, |t| t.total_energy)
}

/// Straight-line program for `ops`. Independent operands use disjoint
/// destination and source registers; the dependent variant feeds each
/// result into the next instruction's source.
pub fn sequence_program(ops: &[Opcode], dependent: bool) -> Vec<Instruction> {
    let mut prog = Vec::with_capacity(ops.len());
    let mut last_result: Option<u8> = None;
    for (p, &op) in ops.iter().enumerate() {
        let dest = 2 + (p % 12) as u8;
        let src = match last_result {
            Some(r) if dependent => r,
            _ => 16 + (p % 12) as u8,
        };
        prog.push(Instruction::rr(op, dest, src));
        last_result = Some(if op == Opcode::Mul { 0 } else { dest });
    }
    prog
}

/// Measured transition energy of a sequence: every cycle except the first,
/// plus meter noise, over randomized starting states.
pub fn measure_sequence(
    ops: &[Opcode],
    dependent: bool,
    params: &PowerModelParams,
    cfg: &ProtocolConfig,
) -> EmpiricalSample {
    sample_runs(&sequence_program(ops, dependent), params, cfg, |t| t.transition_energy())
}

/// Like [`measure_sequence`] for an arbitrary listing.
pub fn measure_program(
    prog: &[Instruction],
    params: &PowerModelParams,
    cfg: &ProtocolConfig,
) -> EmpiricalSample {
    sample_runs(prog, params, cfg, |t| t.transition_energy())
}

fn sample_runs(
    prog: &[Instruction],
    params: &PowerModelParams,
    cfg: &ProtocolConfig,
    pick: impl Fn(&crate::isa_sim::EnergyTrace) -> f64 + Sync,
) -> EmpiricalSample {
    let values: Vec<f64> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = child_seed(cfg.seed, i);
            let state = MachineState::randomized(&mut seeded(seed, 0));
            pick(&run_from_state(prog, state, params, seed))
        })
        .collect();
    EmpiricalSample::new(values, Unit::Picojoule).expect("simulated energies are finite")
}

fn with_pair(a: Opcode, b: Opcode, r: Result<WeibullParams, ComposeError>) -> Result<WeibullParams, ComposeError> {
    r.map_err(|e| ComposeError::Pair {
        op_a: a,
        op_b: b,
        source: Box::new(e),
    })
}

/// Characterizes every unordered pair over `opcodes` on the simulator.
///
/// Bodies measured, with `m` for mov:
/// `m m m m` gives four copies of `E(m,m)`;
/// `m m i m` gives `2 E(m,m) + 2 E(m,i)`, the first cycle standing in for a
/// mov-to-mov transition from the randomized state;
/// `m i j m` gives `E(m,m) + E(m,i) + E(i,j) + E(j,m)`.
pub fn build_transition_table(
    opcodes: &[Opcode],
    params: &PowerModelParams,
    cfg: &ProtocolConfig,
) -> Result<TransitionTable, ComposeError> {
    use Opcode::Mov;
    let ops: BTreeSet<Opcode> = opcodes.iter().copied().collect();
    if !ops.contains(&Mov) {
        return Err(ComposeError::Domain("opcode set must contain mov".into()));
    }
    let others: Vec<Opcode> = ops.iter().copied().filter(|&o| o != Mov).collect();
    let mut body_index = 0u64;
    let mut next_cfg = || {
        body_index += 1;
        ProtocolConfig {
            runs: cfg.runs,
            seed: child_seed(cfg.seed, body_index.wrapping_mul(0x1_0000_0001)),
        }
    };

    let mut table = TransitionTable::new();
    let sample = sample_body(&characterization_body([Mov; 4]), params, &next_cfg());
    let mm = with_pair(Mov, Mov, characterize_mov_mov(&sample))?;
    table.insert(Mov, Mov, mm, cfg.runs);

    for &i in &others {
        let sample = sample_body(&characterization_body([Mov, Mov, i, Mov]), params, &next_cfg());
        let mi = with_pair(Mov, i, characterize_repeated(&sample, &[mm, mm], 2))?;
        table.insert(Mov, i, mi, cfg.runs);
    }

    for (x, &i) in others.iter().enumerate() {
        for &j in &others[x..] {
            let sample = sample_body(&characterization_body([Mov, i, j, Mov]), params, &next_cfg());
            let known = [mm, *table.get(Mov, i).unwrap(), *table.get(Mov, j).unwrap()];
            let ij = with_pair(i, j, characterize_transition(&sample, &known))?;
            table.insert(i, j, ij, cfg.runs);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Weibull};
    use Opcode::*;

    fn draws(parts: &[WeibullParams], copies: &[usize], n: usize, seed: u64) -> EmpiricalSample {
        let mut rng = seeded(seed, 0);
        let dists: Vec<_> = parts.iter().map(|p| Weibull::new(p.sigma, p.k).unwrap()).collect();
        let v = (0..n)
            .map(|_| {
                parts
                    .iter()
                    .zip(&dists)
                    .zip(copies)
                    .map(|((p, d), &c)| (0..c).map(|_| p.mu + d.sample(&mut rng)).sum::<f64>())
                    .sum()
            })
            .collect();
        EmpiricalSample::new(v, Unit::Picojoule).unwrap()
    }

    #[test]
    fn mov_mov_from_four_sums() {
        let w = WeibullParams::new(2.0, 1500.0, 200.0).unwrap();
        let s = draws(&[w], &[4], 100_000, 1);
        let r = characterize_mov_mov(&s).unwrap();
        assert!(((r.mean() - w.mean()) / w.mean()).abs() < 0.05);
        assert!(((r.variance() - w.variance()) / w.variance()).abs() < 0.05);
        assert!(((r.k - w.k) / w.k).abs() < 0.05, "{r:?}");
        let flat = EmpiricalSample::new(vec![3.0; 2000], Unit::Picojoule).unwrap();
        assert!(matches!(
            characterize_mov_mov(&flat),
            Err(ComposeError::Dist(DistError::DegenerateSample))
        ));
    }

    #[test]
    fn empty_known_list_matches_own_moments() {
        let w = WeibullParams::new(1.5, 10.0, 3.0).unwrap();
        let s = draws(&[w], &[1], 20_000, 2);
        let m = moments(&s).unwrap();
        let r = characterize_transition(&s, &[]).unwrap();
        assert!((r.mean() - m.mean).abs() < 1e-6);
        assert!((r.variance() - m.variance).abs() / m.variance < 1e-6);
    }

    #[test]
    fn overlarge_known_variance() {
        let w = WeibullParams::new(2.0, 0.0, 1.0).unwrap();
        let s = draws(&[w], &[1], 5_000, 3);
        let big = WeibullParams::new(2.0, 0.0, 10.0).unwrap();
        assert!(matches!(
            characterize_transition(&s, &[big]),
            Err(ComposeError::NegativeResidualVariance { .. })
        ));
    }

    #[test]
    fn unattainable_residual_skew_is_clamped() {
        // 0,0,...,0,-10 has strong negative skew no Weibull reaches.
        let mut v = vec![0.0; 999];
        v.push(-10.0);
        let s = EmpiricalSample::new(v, Unit::Picojoule).unwrap();
        let r = characterize_transition(&s, &[]).unwrap();
        assert!((r.k - SHAPE_RANGE.1).abs() < 1e-6, "{r:?}");
        assert!(matches!(
            characterize_repeated(&s, &[], 0),
            Err(ComposeError::Domain(_))
        ));
    }

    #[test]
    fn program_shapes() {
        let b = characterization_body([Mov, Mov, Add, Mov]);
        let text: Vec<String> = b.iter().map(|i| i.to_string()).collect();
        assert_eq!(text, ["mov r2, r10", "mov r3, r11", "add r2, r12", "mov r3, r13"]);
        let dep = sequence_program(&[Mul, Add, Lsl], true);
        assert_eq!(dep[1].src.index(), 0);
        assert_eq!(dep[2].src.index(), dep[1].dest.index());
        let ind = sequence_program(&[Mul, Add, Lsl], false);
        assert!(ind.iter().all(|i| i.src.index() >= 16));
    }

    #[test]
    fn mov_only_table() {
        let cfg = ProtocolConfig { runs: 2000, seed: 5 };
        let t = build_transition_table(&[Mov], &PowerModelParams::default(), &cfg).unwrap();
        assert_eq!(t.keys().collect::<Vec<_>>(), vec![crate::compose::TransitionKey::new(Mov, Mov)]);
        assert!(build_transition_table(&[Add], &PowerModelParams::default(), &cfg).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let cfg = ProtocolConfig { runs: 300, seed: 9 };
        let p = PowerModelParams::default();
        let a = measure_sequence(&[Add, Mul, Eor], false, &p, &cfg);
        let b = measure_sequence(&[Add, Mul, Eor], false, &p, &cfg);
        assert_eq!(a, b);
    }
}
