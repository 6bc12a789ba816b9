//! Hand-crafted input patterns on matmult 8x8, highest and lowest five.

use wcec_lab::isa_sim::{Benchmark, PowerModelParams};
use wcec_lab::search::pattern_sweep;

fn main() {
    let params = PowerModelParams::default();
    let mut results = pattern_sweep(Benchmark::MATMULT_SMALL, &params, 0);
    results.sort_by(|a, b| b.avg_power.total_cmp(&a.avg_power));
    println!("{} patterns", results.len());
    for r in results.iter().take(5).chain(results.iter().rev().take(5)) {
        println!("  {:<40} {:.3} mW", r.spec.to_string(), r.avg_power);
    }
}
