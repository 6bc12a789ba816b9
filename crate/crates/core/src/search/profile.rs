use rand::Rng;
use rayon::prelude::*;

use crate::distfit::{EmpiricalSample, Unit};
use crate::isa_sim::{Benchmark, BenchmarkProgram, InputDataset, Layout, PowerModelParams};
use crate::rng::{child_seed, seeded};

/// Dataset with every input bit drawn uniformly.
pub fn random_dataset<R: Rng + ?Sized>(layout: Layout, rng: &mut R) -> InputDataset {
    let mut d = InputDataset::zeroed(layout);
    rng.fill(d.bytes_mut());
    d
}

/// Average power in mW of one benchmark run; `seed` picks the meter noise.
pub(crate) fn avg_power(prog: &BenchmarkProgram, data: &InputDataset, params: &PowerModelParams, seed: u64) -> f64 {
    prog.run(data, params, seed)
        .expect("dataset built for this layout")
        .avg_power
}

/// Average power over `n_runs` uniformly random datasets. Run `i` draws its
/// data and noise from `child_seed(seed, i)`.
pub fn random_profile(benchmark: Benchmark, params: &PowerModelParams, n_runs: usize, seed: u64) -> EmpiricalSample {
    let prog = benchmark.compile();
    let layout = benchmark.layout();
    let values: Vec<f64> = (0..n_runs as u64)
        .into_par_iter()
        .map(|i| {
            let s = child_seed(seed, i);
            let data = random_dataset(layout, &mut seeded(s, 0));
            avg_power(&prog, &data, params, s)
        })
        .collect();
    EmpiricalSample::new(values, Unit::Milliwatt).expect("at least one finite run")
}
