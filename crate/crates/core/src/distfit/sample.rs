use std::fmt;

use serde::{Deserialize, Serialize};

use super::DistError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "pJ")]
    Picojoule,
    #[serde(rename = "mW")]
    Milliwatt,
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Picojoule => "pJ",
            Unit::Milliwatt => "mW",
        })
    }
}

/// Measurements of one quantity, all finite and in one unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    values: Vec<f64>,
    unit: Unit,
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>, unit: Unit) -> Result<Self, DistError> {
        if values.is_empty() {
            return Err(DistError::InsufficientData { needed: 1, got: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DistError::NonFinite);
        }
        Ok(EmpiricalSample { values, unit })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Empirical quantile with linear interpolation between order statistics.
    pub fn quantile(&self, prob: f64) -> f64 {
        let s = self.sorted();
        let pos = prob.clamp(0.0, 1.0) * (s.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
    }

    /// `(max - min) / mean`.
    pub fn relative_range(&self) -> f64 {
        (self.max() - self.min()) / self.mean()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(EmpiricalSample::new(vec![], Unit::Picojoule).is_err());
        assert!(matches!(
            EmpiricalSample::new(vec![1.0, f64::INFINITY], Unit::Picojoule),
            Err(DistError::NonFinite)
        ));
        let s = EmpiricalSample::new(vec![3.0, 1.0, 2.0], Unit::Milliwatt).unwrap();
        assert_eq!(s.sorted(), vec![1.0, 2.0, 3.0]);
        assert_eq!(s.quantile(0.5), 2.0);
        assert_eq!(s.quantile(0.25), 1.5);
        assert!((s.relative_range() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_serializes_as_symbol() {
        assert_eq!(serde_json::to_string(&Unit::Milliwatt).unwrap(), "\"mW\"");
    }
}
