//! Builds a transition table on the simulator, predicts a sequence's energy
//! distribution from it and compares with direct measurement.

use wcec_lab::compose::{build_transition_table, default_grid_step, measure_sequence, predict_sequence, ProtocolConfig};
use wcec_lab::isa_sim::{Opcode, PowerModelParams};

fn main() {
    use Opcode::*;
    let params = PowerModelParams::default();
    let table = build_transition_table(&[Mov, Add, Sub, Mul], &params, &ProtocolConfig { runs: 10_000, seed: 3 }).unwrap();
    for key in table.keys() {
        let (a, b) = key.ops();
        let w = table.get(a, b).unwrap();
        println!("{key:<12} k {:5.2} mean {:7.1} sd {:6.1} pJ", w.k, w.mean(), w.variance().sqrt());
    }

    let seq = [Mov, Add, Mul, Sub, Add, Mul];
    let pred = predict_sequence(&seq, &table, default_grid_step(&seq, &table).unwrap()).unwrap();
    let measured = measure_sequence(&seq, false, &params, &ProtocolConfig { runs: 10_000, seed: 9 });
    println!("{seq:?}");
    println!("  predicted mean {:.0} p99 {:.0} pJ", pred.mean(), pred.percentile(0.99).unwrap());
    println!("  measured  mean {:.0} p99 {:.0} pJ", measured.mean(), measured.quantile(0.99));
}
