use serde::{Deserialize, Serialize};

use super::CliError;
use crate::distfit::{EmpiricalSample, Unit};

/// Fewest bins [`detect_modes`] works on.
pub const MIN_MODE_BINS: usize = 8;
/// A peak must reach this fraction of the tallest smoothed bin.
pub const PEAK_FRACTION: f64 = 0.05;
/// Two peaks are distinct only if the valley between them drops below this
/// fraction of the smaller one.
pub const VALLEY_FRACTION: f64 = 0.5;
const MAX_BINS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub unit: Unit,
}

impl Histogram {
    /// Equal-width bins chosen by the Freedman-Diaconis rule.
    pub fn freedman_diaconis(sample: &EmpiricalSample) -> Self {
        let n = sample.len() as f64;
        let iqr = sample.quantile(0.75) - sample.quantile(0.25);
        let (lo, hi) = (sample.min(), sample.max());
        let range = hi - lo;
        let bins = if range <= 0.0 {
            1
        } else if iqr > 0.0 {
            let width = 2.0 * iqr / n.cbrt();
            ((range / width).ceil() as usize).clamp(1, MAX_BINS)
        } else {
            // all mass in the middle half sits on one value
            (n.sqrt().ceil() as usize).clamp(1, MAX_BINS)
        };
        Self::with_bins(sample, bins)
    }

    pub fn with_bins(sample: &EmpiricalSample, bins: usize) -> Self {
        let bins = bins.max(1);
        let (lo, hi) = (sample.min(), sample.max());
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let bin_edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &v in sample.values() {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Histogram {
            bin_edges,
            counts,
            unit: sample.unit(),
        }
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("bin_start_{0},bin_end_{0},count\n", self.unit);
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.bin_edges[i], self.bin_edges[i + 1], c));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub count: usize,
    pub centers: Vec<f64>,
    /// Smoothed bin heights at the modes.
    pub heights: Vec<f64>,
}

/// Counts the peaks of a histogram after a 3-bin moving average.
pub fn detect_modes(hist: &Histogram) -> Result<ModeReport, CliError> {
    let n = hist.bins();
    if n < MIN_MODE_BINS {
        return Err(CliError::TooFewBins(n));
    }
    let c: Vec<f64> = hist.counts.iter().map(|&x| x as f64).collect();
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let w = &c[i.saturating_sub(1)..(i + 2).min(n)];
            w.iter().sum::<f64>() / w.len() as f64
        })
        .collect();
    let top = smooth.iter().copied().fold(0.0, f64::max);

    // Local maxima; a plateau counts once, at its first bin.
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && smooth[j + 1] == smooth[i] {
            j += 1;
        }
        let left_ok = i == 0 || smooth[i - 1] < smooth[i];
        let right_ok = j + 1 == n || smooth[j + 1] < smooth[i];
        if left_ok && right_ok && smooth[i] > PEAK_FRACTION * top {
            peaks.push(i);
        }
        i = j + 1;
    }

    let mut modes: Vec<usize> = Vec::new();
    for p in peaks {
        match modes.last().copied() {
            None => modes.push(p),
            Some(q) => {
                let valley = smooth[q..=p].iter().copied().fold(f64::INFINITY, f64::min);
                if valley < VALLEY_FRACTION * smooth[q].min(smooth[p]) {
                    modes.push(p);
                } else if smooth[p] > smooth[q] {
                    *modes.last_mut().unwrap() = p;
                }
            }
        }
    }
    Ok(ModeReport {
        count: modes.len(),
        centers: modes.iter().map(|&m| hist.center(m)).collect(),
        heights: modes.iter().map(|&m| smooth[m]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(counts: Vec<u64>) -> Histogram {
        let bin_edges = (0..=counts.len()).map(|i| i as f64).collect();
        Histogram {
            bin_edges,
            counts,
            unit: Unit::Picojoule,
        }
    }

    fn bump(n: usize, center: f64, width: f64, height: f64) -> Vec<f64> {
        (0..n)
            .map(|i| height * (-((i as f64 - center) / width).powi(2) / 2.0).exp())
            .collect()
    }

    #[test]
    fn one_and_two_peaks() {
        let one: Vec<u64> = bump(40, 20.0, 4.0, 500.0).iter().map(|x| x.round() as u64).collect();
        assert_eq!(detect_modes(&hist(one)).unwrap().count, 1);
        let a = bump(60, 15.0, 3.0, 400.0);
        let b = bump(60, 45.0, 3.0, 400.0);
        let two: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + y).round() as u64).collect();
        let r = detect_modes(&hist(two)).unwrap();
        assert_eq!(r.count, 2);
        assert!((r.centers[0] - 15.5).abs() <= 1.0 && (r.centers[1] - 45.5).abs() <= 1.0);
    }

    #[test]
    fn small_side_bumps_ignored() {
        let mut v: Vec<u64> = bump(40, 20.0, 4.0, 1000.0).iter().map(|x| x.round() as u64).collect();
        v[38] = 20; // under 5 % of the peak
        assert_eq!(detect_modes(&hist(v)).unwrap().count, 1);
        // a shallow dip between two peaks does not split them
        let v = vec![0, 10, 100, 90, 80, 95, 10, 0, 0, 0];
        assert_eq!(detect_modes(&hist(v)).unwrap().count, 1);
    }

    #[test]
    fn needs_eight_bins() {
        assert!(matches!(detect_modes(&hist(vec![1, 2, 3])), Err(CliError::TooFewBins(3))));
    }

    #[test]
    fn freedman_diaconis_bins() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let s = EmpiricalSample::new(v, Unit::Milliwatt).unwrap();
        let h = Histogram::freedman_diaconis(&s);
        // IQR 499.5, width 2*499.5/10 = 99.9, range 999 -> 10 bins
        assert_eq!(h.bins(), 10);
        assert_eq!(h.counts.iter().sum::<u64>(), 1000);
        assert_eq!(h.bin_edges.len(), h.counts.len() + 1);
        assert!(h.bin_edges.windows(2).all(|w| w[1] > w[0]));
        assert!(h.to_csv().starts_with("bin_start_mW,bin_end_mW,count\n0,"));
    }
}
