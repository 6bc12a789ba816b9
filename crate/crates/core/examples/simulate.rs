//! Runs a short listing on the simulated core and prints each cycle's energy.

use wcec_lab::isa_sim::{parse_program, run_sequence, PowerModelParams, NUM_REGS};

fn main() {
    let params = PowerModelParams::default();
    let prog = parse_program("mov r2, r10; add r2, r11; mul r2, r12; eor r3, r0; lsl r4, r3; nop").unwrap();
    let mut regs = [0u8; NUM_REGS];
    regs[10] = 0x5a;
    regs[11] = 0x0f;
    regs[12] = 0xc3;

    let trace = run_sequence(&prog, regs, &params, 7);
    for (instr, e) in prog.iter().zip(&trace.per_cycle) {
        println!("{:<16} {e:8.1} pJ", instr.to_string());
    }
    println!(
        "total {:.1} pJ (noise {:+.1}), {} cycles, {:.3} mW",
        trace.total_energy, trace.noise, trace.cycles, trace.avg_power
    );
}
