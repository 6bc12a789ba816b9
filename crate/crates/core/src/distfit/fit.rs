//! Three-parameter Weibull maximum likelihood.
//!
//! The location is profiled out: for each candidate `mu` below the sample
//! minimum the shape and scale have a two-parameter MLE, and the outer search
//! maximizes the resulting profile log-likelihood over `mu`.

use serde::{Deserialize, Serialize};

use super::{DistError, EmpiricalSample, WeibullParams};

pub const MIN_FIT_SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(flatten)]
    pub params: WeibullParams,
    /// Kolmogorov-Smirnov distance between the sample and the fitted CDF.
    pub ks_stat: f64,
    #[serde(rename = "n")]
    pub sample_size: usize,
}

/// Grid points of the coarse scan over the location offset.
const SCAN_POINTS: usize = 48;
const NEWTON_MAX_ITER: usize = 100;

pub fn fit_weibull(sample: &EmpiricalSample) -> Result<FitReport, DistError> {
    let n = sample.len();
    if n < MIN_FIT_SAMPLES {
        return Err(DistError::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: n,
        });
    }
    let xs = sample.sorted();
    let (min, max) = (xs[0], xs[n - 1]);
    let range = max - min;
    if range <= 0.0 {
        return Err(DistError::DegenerateSample);
    }
    // Work on a shifted, rescaled copy so the likelihood sees O(1) values
    // whatever the physical offset of the data.
    let z: Vec<f64> = xs.iter().map(|x| (x - min) / range).collect();
    let eps: f64 = 1e-6;

    // mu = min - range * delta, delta in [eps, 1]; scan log-spaced delta.
    let ln_lo = eps.ln();
    let ln_hi = 0.0f64;
    let profile = |ln_delta: f64| -> Result<(f64, f64, f64), DistError> {
        let delta = ln_delta.exp();
        let (k, sigma, ll) = fit_two_param(&z, delta)?;
        Ok((k, sigma, ll))
    };

    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| ln_lo + (ln_hi - ln_lo) * i as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let mut best_i = None;
    let mut best_ll = f64::NEG_INFINITY;
    for (i, &g) in grid.iter().enumerate() {
        if let Ok((_, _, ll)) = profile(g) {
            if ll > best_ll {
                best_ll = ll;
                best_i = Some(i);
            }
        }
    }
    let best_i = best_i.ok_or(DistError::FitDivergence)?;
    let mut a = grid[best_i.saturating_sub(1)];
    let mut b = grid[(best_i + 1).min(SCAN_POINTS - 1)];

    // Golden-section refinement of the bracketing interval.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |g: f64| profile(g).map(|r| r.2).unwrap_or(f64::NEG_INFINITY);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    while (b - a).abs() > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    let mut ln_delta = 0.5 * (a + b);
    if eval(ln_delta) < best_ll {
        ln_delta = grid[best_i];
    }
    let (k, sigma_z, _) = profile(ln_delta)?;
    let params = WeibullParams::new(k, min - range * ln_delta.exp(), sigma_z * range)?;
    Ok(FitReport {
        ks_stat: ks_statistic(&xs, &params),
        params,
        sample_size: n,
    })
}

/// Two-parameter MLE of `(k, sigma)` for `y = z + delta`; returns the
/// maximized log-likelihood (in the rescaled units) as well.
fn fit_two_param(z: &[f64], delta: f64) -> Result<(f64, f64, f64), DistError> {
    let n = z.len() as f64;
    let ln_y: Vec<f64> = z.iter().map(|&v| (v + delta).ln()).collect();
    let ln_max = ln_y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean_ln = ln_y.iter().sum::<f64>() / n;

    // Score equation in k, with y scaled by its maximum to keep y^k bounded:
    // g(k) = sum(w ln y) / sum(w) - 1/k - mean(ln y), w = (y / y_max)^k.
    // g is strictly increasing, so a bracketed Newton iteration is safe.
    let score = |k: f64| -> (f64, f64) {
        let (mut b, mut a, mut c) = (0.0, 0.0, 0.0);
        for &l in &ln_y {
            let w = (k * (l - ln_max)).exp();
            b += w;
            a += w * l;
            c += w * l * l;
        }
        let g = a / b - 1.0 / k - mean_ln;
        let dg = (c * b - a * a) / (b * b) + 1.0 / (k * k);
        (g, dg)
    };

    let sd_ln = (ln_y.iter().map(|l| (l - mean_ln).powi(2)).sum::<f64>() / n).sqrt();
    if sd_ln == 0.0 || !sd_ln.is_finite() {
        return Err(DistError::DegenerateSample);
    }
    let starts = [1.2 / sd_ln, 1.0, 0.5 / sd_ln, 5.0 / sd_ln];
    let mut k = None;
    'restart: for &k0 in &starts {
        let (mut lo, mut hi) = (1e-6f64, 1e6f64);
        let mut kk = k0.clamp(lo * 10.0, hi / 10.0);
        for _ in 0..NEWTON_MAX_ITER {
            let (g, dg) = score(kk);
            if !g.is_finite() || !dg.is_finite() {
                continue 'restart;
            }
            if g > 0.0 {
                hi = hi.min(kk);
            } else {
                lo = lo.max(kk);
            }
            let mut next = kk - g / dg;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if ((next - kk) / kk).abs() < 1e-12 {
                k = Some(next);
                break 'restart;
            }
            kk = next;
        }
    }
    let k = k.ok_or(DistError::FitDivergence)?;

    let mean_pow = ln_y.iter().map(|&l| (k * (l - ln_max)).exp()).sum::<f64>() / n;
    let ln_sigma = ln_max + mean_pow.ln() / k;
    // At the MLE sum((y/sigma)^k) = n, which gives this closed form.
    let ll = n * k.ln() - n * k * ln_sigma + (k - 1.0) * mean_ln * n - n;
    Ok((k, ln_sigma.exp(), ll))
}

/// Kolmogorov-Smirnov D of sorted data against a Weibull CDF.
pub fn ks_statistic(sorted: &[f64], p: &WeibullParams) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = p.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}
