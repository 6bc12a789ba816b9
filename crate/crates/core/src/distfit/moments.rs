use serde::{Deserialize, Serialize};

use super::weibull::{standard_skewness, WeibullParams};
use super::{DistError, EmpiricalSample};
use statrs::function::gamma::gamma;

/// Shape bracket searched when matching a skewness.
pub const SHAPE_RANGE: (f64, f64) = (0.1, 50.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    /// Unbiased.
    pub variance: f64,
    /// Adjusted Fisher-Pearson coefficient `k3 / s^3`.
    pub skewness: f64,
}

impl Moments {
    pub fn third_central(&self) -> f64 {
        self.skewness * self.variance.powf(1.5)
    }

    pub fn of_weibull(p: &WeibullParams) -> Self {
        Moments {
            mean: p.mean(),
            variance: p.variance(),
            skewness: p.skewness(),
        }
    }
}

pub fn moments(sample: &EmpiricalSample) -> Result<Moments, DistError> {
    moments_of(sample.values())
}

pub(crate) fn moments_of(values: &[f64]) -> Result<Moments, DistError> {
    let n = values.len();
    if n < 3 {
        return Err(DistError::InsufficientData { needed: 3, got: n });
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let (m2, m3) = values.iter().fold((0.0, 0.0), |(s2, s3), &x| {
        let d = x - mean;
        (s2 + d * d, s3 + d * d * d)
    });
    let (m2, m3) = (m2 / nf, m3 / nf);
    if m2 <= 0.0 || values.iter().all(|&v| v == values[0]) {
        return Err(DistError::DegenerateSample);
    }
    let g1 = m3 / m2.powf(1.5);
    Ok(Moments {
        mean,
        variance: m2 * nf / (nf - 1.0),
        skewness: g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0),
    })
}

/// Weibull with the given mean, variance and skewness.
///
/// Skewness fixes the shape (it is location and scale free and strictly
/// decreasing in `k`), which is found by bisection on [`SHAPE_RANGE`]; the
/// variance then fixes the scale and the mean the location.
pub fn weibull_from_moments(mean: f64, variance: f64, skewness: f64) -> Result<WeibullParams, DistError> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(DistError::Domain(format!("variance {variance} must be positive")));
    }
    if !(mean.is_finite() && skewness.is_finite()) {
        return Err(DistError::NonFinite);
    }
    let (mut lo, mut hi) = SHAPE_RANGE;
    let (s_max, s_min) = (standard_skewness(lo), standard_skewness(hi));
    if skewness > s_max || skewness < s_min {
        return Err(DistError::SkewnessOutOfRange(skewness));
    }
    // Bisect in log k: the skewness map varies over orders of magnitude near
    // the small-shape end.
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if standard_skewness(mid) > skewness {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    let k = (lo * hi).sqrt();
    let g1 = gamma(1.0 + 1.0 / k);
    let g2 = gamma(1.0 + 2.0 / k);
    let sigma = (variance / (g2 - g1 * g1)).sqrt();
    WeibullParams::new(k, mean - sigma * g1, sigma)
}

pub fn weibull_matching(m: &Moments) -> Result<WeibullParams, DistError> {
    weibull_from_moments(m.mean, m.variance, m.skewness)
}
