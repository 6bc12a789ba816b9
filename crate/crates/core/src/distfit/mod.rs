//! Weibull distribution model, sample fitting, and tail estimates.

mod fit;
mod moments;
mod sample;
mod weibull;

use thiserror::Error;

pub use fit::{fit_weibull, ks_statistic, FitReport, MIN_FIT_SAMPLES};
pub use moments::{moments, weibull_from_moments, weibull_matching, Moments, SHAPE_RANGE};
pub use sample::{EmpiricalSample, Unit};
pub use weibull::{
    exceedance_probability, probabilistic_max, standard_skewness, weibull_cdf, weibull_pdf,
    weibull_quantile, DataSpaceSize, WeibullParams,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DistError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid Weibull parameters k={k} mu={mu} sigma={sigma}")]
    InvalidParams { k: f64, mu: f64, sigma: f64 },
    #[error("sample has no spread")]
    DegenerateSample,
    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("sample contains non-finite values")]
    NonFinite,
    #[error("maximum likelihood iteration did not converge")]
    FitDivergence,
    #[error("skewness {0} is not attainable by a Weibull with shape in [0.1, 50]")]
    SkewnessOutOfRange(f64),
}
