//! Random-data power profile of a benchmark and its three-parameter Weibull fit.

use wcec_lab::cli::Histogram;
use wcec_lab::distfit::fit_weibull;
use wcec_lab::isa_sim::{Benchmark, PowerModelParams};
use wcec_lab::search::random_profile;

fn main() {
    let params = PowerModelParams::default();
    for bench in [Benchmark::MATMULT_SMALL, Benchmark::FDCT] {
        let sample = random_profile(bench, &params, 10_000, 1);
        let fit = fit_weibull(&sample).unwrap();
        println!(
            "{bench}: mean {:.3} mW, range {:.3}..{:.3} ({:.2}%)",
            sample.mean(),
            sample.min(),
            sample.max(),
            100.0 * sample.relative_range()
        );
        println!(
            "  fit k {:.3} mu {:.3} sigma {:.3}, KS {:.4}",
            fit.params.k, fit.params.mu, fit.params.sigma, fit.ks_stat
        );
        let hist = Histogram::freedman_diaconis(&sample);
        println!("  {} histogram bins", hist.bins());
    }
}
