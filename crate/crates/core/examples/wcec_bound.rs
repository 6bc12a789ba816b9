//! Probabilistic highest power over a benchmark's whole input space, and how
//! unlikely it is for a random input to exceed a few reference levels.

use wcec_lab::distfit::{exceedance_probability, fit_weibull, probabilistic_max, DataSpaceSize};
use wcec_lab::isa_sim::{Benchmark, PowerModelParams};
use wcec_lab::search::random_profile;

fn main() {
    let params = PowerModelParams::default();
    let bench = Benchmark::FDCT;
    let sample = random_profile(bench, &params, 10_000, 0);
    let fit = fit_weibull(&sample).unwrap();
    let space = DataSpaceSize::from_bits(bench.layout().input_bits()).unwrap();
    let x_star = probabilistic_max(&fit.params, space);
    println!("{bench}: {} input bits, observed max {:.3} mW, x* {:.3} mW", space.nbits(), sample.max(), x_star);
    for level in [sample.max(), 0.5 * (sample.max() + x_star), x_star] {
        println!("  P(power > {level:.3}) = {:.3e}", exceedance_probability(&fit.params, level));
    }
    for nbits in [64, 1024, 8192] {
        let x = probabilistic_max(&fit.params, DataSpaceSize::from_bits(nbits).unwrap());
        println!("  x* for a {nbits}-bit space: {x:.3} mW");
    }
}
