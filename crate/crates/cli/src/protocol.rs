//! Triangular cyclic load protocols.
//!
//! A protocol is defined by the amplitude `A = (peak - valley) / 2`, the
//! ratio `R = valley / peak`, a cycle count, and a sampling density. Each
//! cycle traverses start -> peak -> valley -> start at a uniform rate, where
//! the start level is zero clamped into the cycle range, so a fully reversed
//! protocol (`R = -1`) runs 0 -> +A -> -A -> 0 with exactly zero mean. The
//! folded path of one cycle has length `4 A` regardless of `R`, sampled at
//! `4 * points_per_quarter` evenly spaced increments. The test frequency
//! follows from the constant rate: one cycle covers `4 A`, so
//! `f = rate / (4 A)`.

use crate::CliError;

/// Cyclic test frequency in Hz from the loading rate and amplitude.
pub fn frequency_from_rate(rate: f64, amplitude: f64) -> Result<f64, CliError> {
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(CliError::Scenario(format!(
            "frequency needs a positive amplitude, got {amplitude}"
        )));
    }
    if !rate.is_finite() || rate < 0.0 {
        return Err(CliError::Scenario(format!(
            "loading rate must be finite and >= 0, got {rate}"
        )));
    }
    Ok(rate / (4.0 * amplitude))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleProtocol {
    /// Half the peak-to-valley span, strain or mm.
    pub amplitude: f64,
    /// Valley over peak.
    pub ratio: f64,
    pub cycles: usize,
    pub points_per_quarter: usize,
    /// Loading rate in amplitude units per second (0 for rate-independent runs).
    pub rate: f64,
}

impl CycleProtocol {
    pub fn new(
        amplitude: f64,
        ratio: f64,
        cycles: usize,
        points_per_quarter: usize,
        rate: f64,
    ) -> Result<Self, CliError> {
        if !(amplitude > 0.0) || !amplitude.is_finite() {
            return Err(CliError::Scenario(format!(
                "protocol amplitude must be positive, got {amplitude}"
            )));
        }
        if !ratio.is_finite() || ratio >= 1.0 {
            return Err(CliError::Scenario(format!(
                "protocol ratio must be finite and < 1, got {ratio}"
            )));
        }
        if cycles == 0 {
            return Err(CliError::Scenario("protocol needs at least one cycle".into()));
        }
        if points_per_quarter < 4 {
            return Err(CliError::Scenario(format!(
                "protocol needs at least 4 points per quarter cycle, got {points_per_quarter}"
            )));
        }
        if !rate.is_finite() || rate < 0.0 {
            return Err(CliError::Scenario(format!(
                "protocol rate must be finite and >= 0, got {rate}"
            )));
        }
        Ok(Self {
            amplitude,
            ratio,
            cycles,
            points_per_quarter,
            rate,
        })
    }

    pub fn peak(&self) -> f64 {
        2.0 * self.amplitude / (1.0 - self.ratio)
    }

    pub fn valley(&self) -> f64 {
        self.ratio * self.peak()
    }

    /// Level each cycle starts and ends at: zero clamped into the range.
    pub fn start(&self) -> f64 {
        0.0_f64.clamp(self.valley(), self.peak())
    }

    pub fn points_per_cycle(&self) -> usize {
        4 * self.points_per_quarter
    }

    pub fn frequency(&self) -> Result<f64, CliError> {
        frequency_from_rate(self.rate, self.amplitude)
    }

    /// Load level at sample `j` (1-based) of one cycle, walking the folded
    /// path start -> peak -> valley -> start at uniform spacing.
    pub fn sample(&self, j: usize) -> f64 {
        assert!(j >= 1 && j <= self.points_per_cycle(), "sample index out of range");
        let peak = self.peak();
        let valley = self.valley();
        let start = self.start();
        let p = j as f64 * self.amplitude / self.points_per_quarter as f64;
        let up = peak - start;
        let span = peak - valley;
        if p <= up {
            start + p
        } else if p <= up + span {
            peak - (p - up)
        } else {
            valley + (p - up - span)
        }
    }

    /// All load levels of one cycle, in order.
    pub fn cycle_samples(&self) -> Vec<f64> {
        (1..=self.points_per_cycle()).map(|j| self.sample(j)).collect()
    }
}

/// Secant window of the unloading branch: the index of the load peak and the
/// index one tenth of the way down the branch, at least one sample later.
/// Returns `None` when the trace never descends after its maximum.
pub fn unloading_secant_window(samples: &[f64]) -> Option<(usize, usize)> {
    if samples.len() < 2 {
        return None;
    }
    let peak = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)?;
    let descent = &samples[peak..];
    if descent.len() < 2 {
        return None;
    }
    let valley_rel = descent
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)?;
    if valley_rel == 0 {
        return None;
    }
    let window = ((0.10 * valley_rel as f64).round() as usize).max(1);
    Some((peak, peak + window.min(valley_rel)))
}
