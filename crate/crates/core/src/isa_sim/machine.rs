use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::isa::{hamming_distance, hamming_weight, partial_product_bits};
use super::{Instruction, Opcode, PowerModelParams, NUM_REGS};
use crate::rng::seeded;

/// Architectural state plus the switching history the energy model needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineState {
    pub regs: [u8; NUM_REGS],
    /// Last value driven onto the internal result bus.
    pub prev_bus: u16,
    pub cycle: u64,
}

impl Default for MachineState {
    fn default() -> Self {
        MachineState::new([0; NUM_REGS])
    }
}

impl MachineState {
    pub fn new(regs: [u8; NUM_REGS]) -> Self {
        MachineState {
            regs,
            prev_bus: 0,
            cycle: 0,
        }
    }

    /// Registers and bus filled with independent uniform values.
    pub fn randomized<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut regs = [0u8; NUM_REGS];
        rng.fill(&mut regs[..]);
        MachineState {
            regs,
            prev_bus: rng.random(),
            cycle: 0,
        }
    }

    /// Executes one instruction and returns the energy of its cycle in pJ.
    /// Noise is never applied here.
    pub fn step(&mut self, instr: &Instruction, params: &PowerModelParams) -> f64 {
        let d = instr.dest.index();
        let s = instr.src.index();
        let a = self.regs[d];
        let b = self.regs[s];

        let result: u16 = match instr.op {
            Opcode::Nop => {
                self.cycle += 1;
                return params.base.nop;
            }
            Opcode::Mov => u16::from(b),
            Opcode::Add => u16::from(a.wrapping_add(b)),
            Opcode::Sub => u16::from(a.wrapping_sub(b)),
            Opcode::Eor => u16::from(a ^ b),
            Opcode::And => u16::from(a & b),
            Opcode::Or => u16::from(a | b),
            Opcode::Lsl => u16::from(b << 1),
            Opcode::Mul => u16::from(a) * u16::from(b),
        };

        let mut energy = params.base.get(instr.op)
            + params.alpha * f64::from(hamming_weight(b.into()) + hamming_weight(a.into()))
            + params.beta * f64::from(hamming_distance(self.prev_bus, result));
        if instr.op == Opcode::Mul {
            energy += params.gamma * f64::from(partial_product_bits(a, b));
            let [lo, hi] = result.to_le_bytes();
            self.regs[0] = lo;
            self.regs[1] = hi;
        } else {
            self.regs[d] = result as u8;
        }
        self.prev_bus = result;
        self.cycle += 1;
        energy
    }

    /// Folds [`MachineState::step`] over `instrs`, collecting per-cycle energies.
    pub fn execute(&mut self, instrs: &[Instruction], params: &PowerModelParams) -> Vec<f64> {
        instrs.iter().map(|i| self.step(i, params)).collect()
    }
}

/// Energy record of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    /// Noise-free energy of each cycle, pJ.
    pub per_cycle: Vec<f64>,
    /// Sum of `per_cycle` plus the run's noise sample, pJ.
    pub total_energy: f64,
    pub cycles: u64,
    /// mW.
    pub avg_power: f64,
    /// The measurement-noise sample included in `total_energy`, pJ.
    pub noise: f64,
}

impl EnergyTrace {
    pub fn from_cycles(per_cycle: Vec<f64>, noise: f64, params: &PowerModelParams) -> Self {
        let cycles = per_cycle.len() as u64;
        let total_energy = per_cycle.iter().sum::<f64>() + noise;
        let avg_power = if cycles == 0 {
            0.0
        } else {
            total_energy / (cycles as f64 * params.cycle_time)
        };
        EnergyTrace {
            per_cycle,
            total_energy,
            cycles,
            avg_power,
            noise,
        }
    }

    /// Total energy excluding the first cycle: the energy of the transitions
    /// between consecutive instructions of the run.
    pub fn transition_energy(&self) -> f64 {
        self.total_energy - self.per_cycle.first().copied().unwrap_or(0.0)
    }
}

/// One zero-mean Gaussian meter-noise sample for the run identified by `seed`.
pub fn measurement_noise(params: &PowerModelParams, seed: u64) -> f64 {
    if params.noise_sigma == 0.0 {
        return 0.0;
    }
    let normal = Normal::new(0.0, params.noise_sigma).expect("noise_sigma validated");
    normal.sample(&mut seeded(seed, NOISE_STREAM))
}

const NOISE_STREAM: u64 = 0x6e6f_6973_65;

/// Runs `instrs` from the given register file and a cleared bus.
pub fn run_sequence(
    instrs: &[Instruction],
    initial_regs: [u8; NUM_REGS],
    params: &PowerModelParams,
    seed: u64,
) -> EnergyTrace {
    run_from_state(instrs, MachineState::new(initial_regs), params, seed)
}

/// Runs `instrs` from an arbitrary starting state.
pub fn run_from_state(
    instrs: &[Instruction],
    mut state: MachineState,
    params: &PowerModelParams,
    seed: u64,
) -> EnergyTrace {
    let per_cycle = state.execute(instrs, params);
    EnergyTrace::from_cycles(per_cycle, measurement_noise(params, seed), params)
}
