use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::ComposeError;
use crate::distfit::WeibullParams;

/// Upper tail mass dropped when a continuous density is put on a grid.
pub const TAIL_MASS: f64 = 1e-12;
/// Fewest occupied bins [`discretize`] accepts.
pub const MIN_BINS: usize = 32;

/// Piecewise-constant density on equal bins `[origin + i*step, origin + (i+1)*step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedPdf {
    origin: f64,
    step: f64,
    densities: Vec<f64>,
}

impl GriddedPdf {
    /// Builds a pdf from unnormalized densities; they are rescaled so the
    /// total mass is one.
    pub fn new(origin: f64, step: f64, densities: Vec<f64>) -> Result<Self, ComposeError> {
        if !(step.is_finite() && step > 0.0) || !origin.is_finite() {
            return Err(ComposeError::Domain(format!("grid origin {origin}, step {step}")));
        }
        if densities.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(ComposeError::Domain("densities must be finite and non-negative".into()));
        }
        let total: f64 = densities.iter().sum::<f64>() * step;
        if !(total > 0.0) {
            return Err(ComposeError::Domain("density has no mass".into()));
        }
        let densities = densities.into_iter().map(|d| d / total).collect();
        Ok(GriddedPdf { origin, step, densities })
    }

    fn from_masses(origin: f64, step: f64, masses: &[f64]) -> Self {
        let (lo, hi) = trim_tails(masses);
        let kept = &masses[lo..hi];
        let total: f64 = kept.iter().sum();
        GriddedPdf {
            origin: origin + lo as f64 * step,
            step,
            densities: kept.iter().map(|m| m / (total * step)).collect(),
        }
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn len(&self) -> usize {
        self.densities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.densities.is_empty()
    }

    /// Right edge of the last bin.
    pub fn end(&self) -> f64 {
        self.origin + self.len() as f64 * self.step
    }

    pub fn masses(&self) -> Vec<f64> {
        self.densities.iter().map(|d| d * self.step).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.step
    }

    fn bin_center(&self, i: usize) -> f64 {
        self.origin + (i as f64 + 0.5) * self.step
    }

    pub fn mean(&self) -> f64 {
        self.masses()
            .iter()
            .enumerate()
            .map(|(i, m)| m * self.bin_center(i))
            .sum()
    }

    /// Variance with each bin's mass spread uniformly across it.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let between: f64 = self
            .masses()
            .iter()
            .enumerate()
            .map(|(i, m)| m * (self.bin_center(i) - mean).powi(2))
            .sum();
        between + self.step * self.step / 12.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.origin {
            return 0.0;
        }
        let pos = (x - self.origin) / self.step;
        let idx = pos.floor() as usize;
        if idx >= self.len() {
            return 1.0;
        }
        let below: f64 = self.densities[..idx].iter().sum::<f64>() * self.step;
        below + self.densities[idx] * self.step * (pos - idx as f64)
    }

    /// Inverse CDF, linear within a bin.
    pub fn percentile(&self, prob: f64) -> Result<f64, ComposeError> {
        if !(0.0..1.0).contains(&prob) {
            return Err(ComposeError::Domain(format!("probability {prob} outside [0, 1)")));
        }
        if prob == 0.0 {
            return Ok(self.origin);
        }
        let mut cum = 0.0;
        for (i, d) in self.densities.iter().enumerate() {
            let m = d * self.step;
            if m > 0.0 && cum + m >= prob {
                return Ok(self.origin + (i as f64 + (prob - cum) / m) * self.step);
            }
            cum += m;
        }
        Ok(self.end())
    }

    /// The same distribution on bins of width `step`, starting at this origin.
    pub fn resample(&self, step: f64) -> Result<Self, ComposeError> {
        if !(step.is_finite() && step > 0.0) {
            return Err(ComposeError::Domain(format!("grid step {step}")));
        }
        let n = ((self.end() - self.origin) / step).ceil().max(1.0) as usize;
        let mut cum = Vec::with_capacity(self.len() + 1);
        cum.push(0.0);
        for m in self.masses() {
            cum.push(cum.last().unwrap() + m);
        }
        let cdf = |x: f64| -> f64 {
            let pos = ((x - self.origin) / self.step).clamp(0.0, self.len() as f64);
            let idx = (pos.floor() as usize).min(self.len() - 1);
            cum[idx] + (cum[idx + 1] - cum[idx]) * (pos - idx as f64)
        };
        let masses: Vec<f64> = (0..n)
            .map(|i| {
                let a = self.origin + i as f64 * step;
                (cdf(a + step) - cdf(a)).max(0.0)
            })
            .collect();
        Ok(GriddedPdf::from_masses(self.origin, step, &masses))
    }

    /// `bin_start,density` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,density\n");
        for (i, d) in self.densities.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.origin + i as f64 * self.step, d));
        }
        out
    }
}

/// Puts a Weibull density on a grid starting at its location. Each bin holds
/// the exact probability of its interval, so the `k < 1` pole at the origin is
/// harmless.
pub fn discretize(p: &WeibullParams, grid_step: f64) -> Result<GriddedPdf, ComposeError> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(ComposeError::Domain(format!("grid step {grid_step}")));
    }
    let hi = p.quantile(1.0 - TAIL_MASS)?;
    let n = ((hi - p.mu) / grid_step).ceil() as usize;
    let masses: Vec<f64> = (0..n)
        .map(|i| {
            let a = p.mu + i as f64 * grid_step;
            p.cdf(a + grid_step) - p.cdf(a)
        })
        .collect();
    let occupied = masses.iter().filter(|&&m| m > 0.0).count();
    if occupied < MIN_BINS {
        return Err(ComposeError::GridTooCoarse { bins: occupied });
    }
    GriddedPdf::new(p.mu, grid_step, masses.iter().map(|m| m / grid_step).collect())
}

/// Density of the sum of two independent variables.
///
/// Grids with different steps are first brought to the finer step. Bin
/// centres add, so the result starts half a step after the sum of origins.
pub fn convolve(a: &GriddedPdf, b: &GriddedPdf) -> GriddedPdf {
    let step = a.step.min(b.step);
    let regrid = |p: &GriddedPdf| {
        if (p.step - step).abs() <= 1e-12 * step {
            p.clone()
        } else {
            p.resample(step).expect("finer step is valid")
        }
    };
    let (a, b) = (regrid(a), regrid(b));
    let (ma, mb) = (a.masses(), b.masses());
    let masses = if ma.len().min(mb.len()) < 64 {
        convolve_direct(&ma, &mb)
    } else {
        convolve_fft(&ma, &mb)
    };
    GriddedPdf::from_masses(a.origin + b.origin + 0.5 * step, step, &masses)
}

pub(crate) fn convolve_direct(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub(crate) fn convolve_fft(a: &[f64], b: &[f64]) -> Vec<f64> {
    let len = a.len() + b.len() - 1;
    let n = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let lift = |v: &[f64]| {
        let mut buf: Vec<Complex<f64>> = v.iter().map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(n, Complex::new(0.0, 0.0));
        fwd.process(&mut buf);
        buf
    };
    let (fa, fb) = (lift(a), lift(b));
    let mut prod: Vec<Complex<f64>> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
    inv.process(&mut prod);
    // Round-off leaves tiny negative values where the true mass is zero.
    prod[..len].iter().map(|c| (c.re / n as f64).max(0.0)).collect()
}

/// Index range left after dropping tail bins that together hold at most half
/// of [`TAIL_MASS`] on each side.
fn trim_tails(masses: &[f64]) -> (usize, usize) {
    let cut = 0.5 * TAIL_MASS * masses.iter().sum::<f64>();
    let mut lo = 0;
    let mut acc = 0.0;
    while lo + 1 < masses.len() && acc + masses[lo] <= cut {
        acc += masses[lo];
        lo += 1;
    }
    let mut hi = masses.len();
    acc = 0.0;
    while hi > lo + 1 && acc + masses[hi - 1] <= cut {
        acc += masses[hi - 1];
        hi -= 1;
    }
    (lo, hi)
}
