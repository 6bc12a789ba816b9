//! Genetic search for the highest and lowest power input of fdct.

use wcec_lab::isa_sim::{Benchmark, PowerModelParams};
use wcec_lab::search::{ga_optimize, GaConfig, Objective};

fn main() {
    let params = PowerModelParams::default();
    let bench = Benchmark::FDCT;
    for objective in [Objective::Maximize, Objective::Minimize] {
        let cfg = GaConfig { generations: 40, objective, seed: 5, ..GaConfig::default() };
        let res = ga_optimize(bench, &params, &cfg).unwrap();
        let first = &res.trace[0];
        println!(
            "{objective:?}: {:.3} mW after {} evaluations (generation 0 best {:.3}, mean {:.3})",
            res.best_fitness, res.evaluations, first.best, first.mean
        );
        println!("  first bytes {:02x?}", &res.best.bytes()[..16]);
    }
}
