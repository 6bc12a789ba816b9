use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::DistError;

/// Three-parameter Weibull distribution with shape `k`, location `mu` and
/// scale `sigma`: `F(x) = 1 - exp(-((x - mu) / sigma)^k)` for `x >= mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    pub k: f64,
    pub mu: f64,
    pub sigma: f64,
}

/// Size of an input space, kept as its bit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DataSpaceSize {
    nbits: u64,
}

impl DataSpaceSize {
    pub fn from_bits(nbits: u64) -> Result<Self, DistError> {
        if nbits == 0 {
            return Err(DistError::Domain("data space needs at least one bit".into()));
        }
        Ok(DataSpaceSize { nbits })
    }

    pub fn nbits(&self) -> u64 {
        self.nbits
    }

    /// `ln S`, computed without forming `S`.
    pub fn ln_size(&self) -> f64 {
        self.nbits as f64 * std::f64::consts::LN_2
    }
}

impl WeibullParams {
    pub fn new(k: f64, mu: f64, sigma: f64) -> Result<Self, DistError> {
        if !(k.is_finite() && k > 0.0 && sigma.is_finite() && sigma > 0.0 && mu.is_finite()) {
            return Err(DistError::InvalidParams { k, mu, sigma });
        }
        Ok(WeibullParams { k, mu, sigma })
    }

    fn standardized(&self, x: f64) -> f64 {
        (x - self.mu) / self.sigma
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.mu {
            return 0.0;
        }
        -(-self.standardized(x).powf(self.k)).exp_m1()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.mu {
            return 0.0;
        }
        let t = self.standardized(x);
        if t == 0.0 {
            return match self.k {
                k if k < 1.0 => f64::INFINITY,
                k if k == 1.0 => 1.0 / self.sigma,
                _ => 0.0,
            };
        }
        let tk = t.powf(self.k);
        self.k / self.sigma * tk / t * (-tk).exp()
    }

    /// `ln(1 - F(x))`, finite arbitrarily far into the tail.
    pub fn ln_survival(&self, x: f64) -> f64 {
        if x <= self.mu {
            return 0.0;
        }
        -self.standardized(x).powf(self.k)
    }

    /// Inverse CDF for `prob` in `[0, 1)`.
    pub fn quantile(&self, prob: f64) -> Result<f64, DistError> {
        if !(0.0..1.0).contains(&prob) {
            return Err(DistError::Domain(format!("probability {prob} outside [0, 1)")));
        }
        Ok(self.mu + self.sigma * (-(-prob).ln_1p()).powf(1.0 / self.k))
    }

    /// Raw moments of the standard form: `Gamma(1 + i/k)`.
    fn gammas(&self) -> (f64, f64, f64) {
        let k = self.k;
        (gamma(1.0 + 1.0 / k), gamma(1.0 + 2.0 / k), gamma(1.0 + 3.0 / k))
    }

    pub fn mean(&self) -> f64 {
        self.mu + self.sigma * self.gammas().0
    }

    pub fn variance(&self) -> f64 {
        let (g1, g2, _) = self.gammas();
        self.sigma * self.sigma * (g2 - g1 * g1)
    }

    pub fn skewness(&self) -> f64 {
        standard_skewness(self.k)
    }

    /// Third central moment.
    pub fn third_central_moment(&self) -> f64 {
        self.skewness() * self.variance().powf(1.5)
    }
}

/// Skewness of a Weibull with shape `k`; independent of location and scale.
pub fn standard_skewness(k: f64) -> f64 {
    let g1 = gamma(1.0 + 1.0 / k);
    let g2 = gamma(1.0 + 2.0 / k);
    let g3 = gamma(1.0 + 3.0 / k);
    let var = g2 - g1 * g1;
    (g3 - 3.0 * g1 * g2 + 2.0 * g1 * g1 * g1) / var.powf(1.5)
}

pub fn weibull_cdf(x: f64, p: &WeibullParams) -> f64 {
    p.cdf(x)
}

pub fn weibull_pdf(x: f64, p: &WeibullParams) -> f64 {
    p.pdf(x)
}

pub fn weibull_quantile(prob: f64, p: &WeibullParams) -> Result<f64, DistError> {
    p.quantile(prob)
}

/// The value whose exceedance probability times the data-space size is one:
/// `mu + sigma * (nbits * ln 2)^(1/k)`.
pub fn probabilistic_max(p: &WeibullParams, space: DataSpaceSize) -> f64 {
    p.mu + p.sigma * space.ln_size().powf(1.0 / p.k)
}

/// `1 - F(value)` evaluated through the log-survival function, so tail
/// probabilities down to the smallest subnormal do not round to zero early.
pub fn exceedance_probability(p: &WeibullParams, value: f64) -> f64 {
    p.ln_survival(value).exp()
}
