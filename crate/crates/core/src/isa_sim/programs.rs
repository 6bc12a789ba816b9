use super::{Instruction, MachineState, Opcode, PowerModelParams};

/// Register holding `a` for [`mul_chain_program`].
pub const CHAIN_A: usize = 20;
/// Register holding `b` for [`mul_chain_program`].
pub const CHAIN_B: usize = 21;
/// Register that holds the chain's result after it finishes.
pub const CHAIN_RESULT: usize = 3;

/// Passes over the mul/mov block. `a^13 * b^8` sits in [`CHAIN_RESULT`] after
/// the second pass; the third carries on to `a^55 * b^34`.
pub const CHAIN_PASSES: usize = 3;

/// The multiply chain over `a` in r20 and `b` in r21. Each pass over the
/// block advances the exponent pairs like a Fibonacci sequence; only the low
/// product byte (r0) is carried forward, so once any product is zero every
/// later one is too.
pub fn mul_chain_program() -> Vec<Instruction> {
    mul_chain_with_passes(CHAIN_PASSES)
}

pub fn mul_chain_with_passes(passes: usize) -> Vec<Instruction> {
    use Opcode::*;
    let mut p = vec![
        Instruction::rr(Mov, 3, CHAIN_A as u8),
        Instruction::rr(Mov, 4, CHAIN_B as u8),
    ];
    for _ in 0..passes {
        p.extend_from_slice(&[
            Instruction::rr(Mul, 3, 4),
            Instruction::rr(Mov, 2, 0),
            Instruction::rr(Mul, 2, 3),
            Instruction::rr(Mov, 4, 0),
            Instruction::rr(Mul, 4, 2),
            Instruction::rr(Mov, 3, 0),
        ]);
    }
    p
}

/// Steady-state energy of one `mul` cycle for every operand pair.
///
/// Cell `[a][b]` is measured with a fresh register file holding the operands
/// and the bus already carrying their product, as if the same multiply had
/// been repeating. Noise is excluded.
pub fn mul_power_map(params: &PowerModelParams) -> Vec<[f64; 256]> {
    let mul = Instruction::rr(Opcode::Mul, 16, 17);
    (0..256usize)
        .map(|a| {
            std::array::from_fn(|b| {
                let mut st = MachineState::default();
                st.regs[16] = a as u8;
                st.regs[17] = b as u8;
                st.prev_bus = (a * b) as u16;
                st.step(&mul, params)
            })
        })
        .collect()
}

/// `(max - min) / soc_power` of the map, both sides expressed as power.
pub fn mul_map_range_ratio(map: &[[f64; 256]], params: &PowerModelParams) -> f64 {
    let (lo, hi) = map
        .iter()
        .flat_map(|row| row.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    params.cycle_power(hi - lo) / params.soc_power
}
