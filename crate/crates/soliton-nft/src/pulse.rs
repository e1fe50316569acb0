//! Uniformly sampled complex envelopes.

use crate::error::{Error, Result};
use crate::Complex64;

/// Uniform time grid: sample `m` sits at `t_start + m·step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !t_start.is_finite() {
            return Err(Error::InvalidInput(format!(
                "time grid needs finite t_start and step > 0, got t_start = {t_start}, step = {step}"
            )));
        }
        if len < 2 {
            return Err(Error::InvalidInput(format!(
                "time grid needs at least 2 samples, got {len}"
            )));
        }
        Ok(Self { t_start, step, len })
    }

    /// Grid of `len` samples spanning `[center - span/2, center + span/2]`.
    pub fn spanning(center: f64, span: f64, len: usize) -> Result<Self> {
        if !(span > 0.0) {
            return Err(Error::InvalidInput(format!("span must be positive, got {span}")));
        }
        let step = span / (len.saturating_sub(1)).max(1) as f64;
        Self::new(center - span / 2.0, step, len)
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t_start + m as f64 * self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len - 1)
    }
}

/// Complex envelope sampled on a uniform grid.
///
/// Sample `m` is `q(t_m)` with `t_m = t_start + m·step`; the window is
/// `[T₋, T₊] = [t_start, t_start + (M−1)·step]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPulse {
    t_start: f64,
    step: f64,
    samples: Vec<Complex64>,
}

impl SampledPulse {
    pub fn new(t_start: f64, step: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0) || !t_start.is_finite() {
            return Err(Error::InvalidInput(format!(
                "pulse needs finite t_start and step > 0, got t_start = {t_start}, step = {step}"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "pulse needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(m) = samples.iter().position(|q| !q.re.is_finite() || !q.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {m}")));
        }
        Ok(Self { t_start, step, samples })
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self {
            t_start: grid.t_start,
            step: grid.step,
            samples: vec![Complex64::new(0.0, 0.0); grid.len],
        }
    }

    /// Sample an analytic envelope on a grid.
    pub fn from_fn(grid: &TimeGrid, mut f: impl FnMut(f64) -> Complex64) -> Result<Self> {
        let samples = (0..grid.len).map(|m| f(grid.time(m))).collect();
        Self::new(grid.t_start, grid.step, samples)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least two samples
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    /// Window duration `T₊ − T₋`.
    pub fn duration(&self) -> f64 {
        self.t_end() - self.t_start
    }

    pub fn time(&self, m: usize) -> f64 {
        self.t_start + m as f64 * self.step
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t_start: self.t_start,
            step: self.step,
            len: self.len(),
        }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// Pulse energy `h·Σ|q_m|²` (left Riemann sum).
    pub fn energy(&self) -> f64 {
        self.step * self.samples.iter().map(|q| q.norm_sqr()).sum::<f64>()
    }

    /// Tightest window `[T₋, T₊]` outside which every sample satisfies
    /// `|q_m| ≤ threshold`.
    pub fn effective_support(&self, threshold: f64) -> Result<(f64, f64)> {
        let first = self.samples.iter().position(|q| q.norm() > threshold);
        let last = self.samples.iter().rposition(|q| q.norm() > threshold);
        match (first, last) {
            (Some(i), Some(j)) => Ok((self.time(i), self.time(j))),
            _ => Err(Error::AllBelowThreshold { threshold }),
        }
    }

    /// Discard the samples outside the effective support at `threshold`.
    /// The step is unchanged; `t_start` shifts to the first kept sample.
    pub fn truncate(&self, threshold: f64) -> Result<SampledPulse> {
        let (lo, hi) = self.effective_support(threshold)?;
        self.window(lo, hi)
    }

    /// Keep the samples whose time lies in `[t_lo, t_hi]` (inclusive, with
    /// a half-step slack so grid round-off cannot drop edge samples).
    pub fn window(&self, t_lo: f64, t_hi: f64) -> Result<SampledPulse> {
        let slack = 0.5 * self.step;
        let i = ((t_lo - self.t_start - slack) / self.step).ceil().max(0.0) as usize;
        let j = (((t_hi - self.t_start + slack) / self.step).floor() as usize).min(self.len() - 1);
        if j < i + 1 {
            return Err(Error::InvalidInput(format!(
                "window [{t_lo}, {t_hi}] keeps fewer than 2 samples"
            )));
        }
        SampledPulse::new(self.time(i), self.step, self.samples[i..=j].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_pulse_has_zero_energy() {
        let grid = TimeGrid::new(-1.0, 0.25, 9).unwrap();
        assert_eq!(SampledPulse::zeros(&grid).energy(), 0.0);
    }

    #[test]
    fn energy_is_left_riemann_sum() {
        let p = SampledPulse::new(0.0, 0.5, vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)]).unwrap();
        assert!((p.energy() - 0.5 * (1.0 + 4.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn effective_support_of_rectangle() {
        // |q| = 1 on [0, 1], zero elsewhere.
        let grid = TimeGrid::new(-1.0, 0.01, 301).unwrap();
        let p = SampledPulse::from_fn(&grid, |t| {
            if (0.0..=1.0).contains(&t) {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap();
        let (lo, hi) = p.effective_support(0.5).unwrap();
        assert!((lo - 0.0).abs() < 1e-9, "lo = {lo}");
        assert!((hi - 1.0).abs() < 1e-9, "hi = {hi}");
    }

    #[test]
    fn threshold_above_peak_errors() {
        let grid = TimeGrid::new(0.0, 0.1, 11).unwrap();
        let p = SampledPulse::from_fn(&grid, |_| c(0.3, 0.0)).unwrap();
        assert!(matches!(
            p.effective_support(0.5),
            Err(Error::AllBelowThreshold { .. })
        ));
    }

    #[test]
    fn truncate_below_floor_is_identity() {
        let grid = TimeGrid::new(-2.0, 0.05, 81).unwrap();
        let p = SampledPulse::from_fn(&grid, |t| c((-t * t).exp() + 0.2, 0.0)).unwrap();
        let kept = p.truncate(0.1).unwrap();
        assert_eq!(kept, p);
    }

    #[test]
    fn truncate_keeps_step_and_shifts_start() {
        let grid = TimeGrid::new(-5.0, 0.1, 101).unwrap();
        let p = SampledPulse::from_fn(&grid, |t| c((-t * t).exp(), 0.0)).unwrap();
        let q = p.truncate(0.1).unwrap();
        assert_eq!(q.step(), p.step());
        assert!(q.duration() < p.duration());
        // all removed samples were below threshold
        assert!(q.samples().iter().any(|v| v.norm() > 0.1));
        let inner = p.window(q.t_start(), q.t_end()).unwrap();
        assert_eq!(inner, q);
    }

    #[test]
    fn rejects_degenerate_construction() {
        assert!(SampledPulse::new(0.0, 0.0, vec![c(0.0, 0.0); 4]).is_err());
        assert!(SampledPulse::new(0.0, 0.1, vec![c(0.0, 0.0)]).is_err());
        assert!(SampledPulse::new(0.0, 0.1, vec![c(f64::NAN, 0.0); 4]).is_err());
    }
}
