//! Sum of two Weibull energies on a grid, checked against sampled sums.

use rand_distr::{Distribution, Weibull};
use wcec_lab::compose::{convolve, discretize};
use wcec_lab::distfit::WeibullParams;
use wcec_lab::rng::seeded;

fn main() {
    let a = WeibullParams::new(1.5, 100.0, 40.0).unwrap();
    let b = WeibullParams::new(3.0, 250.0, 60.0).unwrap();
    let step = 0.2;
    let sum = convolve(&discretize(&a, step).unwrap(), &discretize(&b, step).unwrap());
    println!("grid: origin {:.1}, {} bins of {step}", sum.origin(), sum.len());
    println!("mean {:.3} (exact {:.3})", sum.mean(), a.mean() + b.mean());
    println!("variance {:.2} (exact {:.2})", sum.variance(), a.variance() + b.variance());

    let (wa, wb) = (Weibull::new(a.sigma, a.k).unwrap(), Weibull::new(b.sigma, b.k).unwrap());
    let mut rng = seeded(1, 0);
    let mut draws: Vec<f64> = (0..200_000)
        .map(|_| a.mu + wa.sample(&mut rng) + b.mu + wb.sample(&mut rng))
        .collect();
    draws.sort_by(f64::total_cmp);
    for prob in [0.5, 0.9, 0.99, 0.999] {
        let sampled = draws[(prob * draws.len() as f64) as usize];
        println!("p{:<5} grid {:8.2}  sampled {:8.2}", prob * 100.0, sum.percentile(prob).unwrap(), sampled);
    }
}
