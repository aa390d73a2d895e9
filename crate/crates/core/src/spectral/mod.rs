//! Periodogram estimation.
//!
//! Three estimators share one output type: the classical (Schuster)
//! periodogram on the Fourier grid `j/n`, Welch's segment average, and
//! Lomb-Scargle for irregular sampling. Powers are on the `|d(f)|²` scale
//! unless the estimate says otherwise, so that `2 P / n_effective` is the
//! variance contributed by a bin (`P / n_effective` at the Nyquist bin).

mod fft;
mod lomb;
mod welch;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fft::dft;
pub use lomb::{lomb_grid, lomb_scargle, LombNormalization, DEFAULT_OVERSAMPLING};
pub use welch::{welch, WelchParams, WindowKind, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Classical,
    Welch,
    LombScargle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Classical => "classical",
            Method::Welch => "welch",
            Method::LombScargle => "lomb_scargle",
        })
    }
}

/// How `power` relates to the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerScale {
    /// `|d(f)|²`
    Periodogram,
    /// `(4/n) |d(f)|²`, i.e. the squared harmonic amplitude.
    Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub method: Method,
    pub scale: PowerScale,
    /// Cycles per month, strictly increasing, in (0, 0.5].
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    /// Samples behind each transform (series length, segment length, or
    /// number of irregular observations).
    pub n_effective: usize,
    /// Number of averaged segments; 1 unless Welch.
    pub segments: usize,
    pub window: Option<WindowKind>,
    /// Population variance of the input series.
    pub variance_total: f64,
    /// Frequencies dropped because their estimate was undefined.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub invalid_freqs: Vec<f64>,
    /// Normalization used, for Lomb-Scargle estimates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lomb_normalization: Option<LombNormalization>,
}

impl SpectralEstimate {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Variance of the series attributed to bin `i`.
    pub fn variance_contribution(&self, i: usize) -> f64 {
        let nyquist = self.freqs[i] == 0.5;
        let n = self.n_effective as f64;
        match (self.scale, nyquist) {
            (PowerScale::Periodogram, false) => 2.0 * self.power[i] / n,
            (PowerScale::Periodogram, true) => self.power[i] / n,
            (PowerScale::Scaled, false) => self.power[i] / 2.0,
            (PowerScale::Scaled, true) => self.power[i] / 4.0,
        }
    }

    /// Share of the series variance attributed to bin `i`.
    pub fn variance_share(&self, i: usize) -> f64 {
        if self.variance_total > 0.0 {
            self.variance_contribution(i) / self.variance_total
        } else {
            0.0
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq,period_months,power,variance_share\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.freqs[i],
                1.0 / self.freqs[i],
                self.power[i],
                self.variance_share(i)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub(crate) fn population_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64
}

fn demeaned(values: &[f64]) -> Vec<f64> {
    let m = mean(values);
    values.iter().map(|v| v - m).collect()
}

/// `|d(f_j)|²` of the mean-removed series for `j = 1..=n/2`.
pub(crate) fn raw_periodogram(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let d = dft(&demeaned(values));
    (1..=n / 2).map(|j| (j as f64 / n as f64, d[j].norm_sqr())).unzip()
}

fn check_len(values: &[f64]) -> Result<()> {
    if values.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("non-finite sample"));
    }
    Ok(())
}

/// Classical periodogram `I(f_j) = |d(f_j)|²` at `f_j = j/n`, `j = 1..=n/2`.
pub fn periodogram(values: &[f64]) -> Result<SpectralEstimate> {
    check_len(values)?;
    let (freqs, power) = raw_periodogram(values);
    Ok(SpectralEstimate {
        method: Method::Classical,
        scale: PowerScale::Periodogram,
        freqs,
        power,
        n_effective: values.len(),
        segments: 1,
        window: None,
        variance_total: population_variance(values),
        invalid_freqs: Vec::new(),
        lomb_normalization: None,
    })
}

/// Periodogram times `4/n`: a bin holding `A cos(2π f_j t + φ)` reads `A²`.
pub fn scaled_periodogram(values: &[f64]) -> Result<SpectralEstimate> {
    let mut est = periodogram(values)?;
    let k = 4.0 / values.len() as f64;
    est.power.iter_mut().for_each(|p| *p *= k);
    est.scale = PowerScale::Scaled;
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParsevalCheck {
    pub variance: f64,
    pub spectral_sum: f64,
    pub relative_gap: f64,
}

/// Compare the population variance with the sum of per-harmonic variance
/// contributions `A_j²/2`, plus `a_{n/2}²` at the Nyquist bin for even n.
pub fn parseval_check(values: &[f64]) -> Result<ParsevalCheck> {
    let est = scaled_periodogram(values)?;
    let variance = est.variance_total;
    if variance <= 0.0 {
        return Err(Error::Degenerate("Parseval check on a zero-variance series".into()));
    }
    let n = values.len();
    let spectral_sum: f64 = est
        .power
        .iter()
        .enumerate()
        .map(|(i, &a2)| if n % 2 == 0 && i + 1 == n / 2 { a2 / 4.0 } else { a2 / 2.0 })
        .sum();
    Ok(ParsevalCheck {
        variance,
        spectral_sum,
        relative_gap: (variance - spectral_sum).abs() / variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::rng::standard_normals;
    use std::f64::consts::TAU;

    fn tone(n: usize, amp: f64, j: usize, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|t| amp * (TAU * j as f64 * t as f64 / n as f64 + phase).cos())
            .collect()
    }

    #[test]
    fn scaled_power_reads_squared_amplitude() {
        let n = 96;
        let x = tone(n, 2.5, 7, 0.4);
        let est = scaled_periodogram(&x).unwrap();
        assert!((est.power[6] - 6.25).abs() < 1e-9);
        let classical = periodogram(&x).unwrap();
        assert!((classical.power[6] - n as f64 / 4.0 * 6.25).abs() < 1e-9);
        for (i, p) in est.power.iter().enumerate() {
            if i != 6 {
                assert!(*p < 1e-12);
            }
        }
    }

    #[test]
    fn zero_series_has_zero_power() {
        let est = periodogram(&[0.0; 32]).unwrap();
        assert!(est.power.iter().all(|&p| p == 0.0));
        assert_eq!(est.freqs.len(), 16);
        assert_eq!(*est.freqs.last().unwrap(), 0.5);
    }

    #[test]
    fn frequency_grid_for_odd_length() {
        let est = periodogram(&standard_normals(1, 257)).unwrap();
        assert_eq!(est.len(), 128);
        assert_eq!(est.freqs[0], 1.0 / 257.0);
        assert!(est.freqs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn parseval_single_and_double_harmonic() {
        let c = parseval_check(&tone(64, 3.0, 5, 0.0)).unwrap();
        assert!((c.variance - 4.5).abs() < 1e-12);
        assert!((c.spectral_sum - 4.5).abs() < 1e-12);

        let two: Vec<f64> = tone(64, 1.0, 3, 0.2)
            .iter()
            .zip(tone(64, 2.0, 11, 1.0))
            .map(|(a, b)| a + b)
            .collect();
        let c = parseval_check(&two).unwrap();
        assert!((c.spectral_sum - 2.5).abs() < 1e-12);
    }

    #[test]
    fn parseval_counts_nyquist_once() {
        let x: Vec<f64> = (0..16).map(|t| if t % 2 == 0 { 1.5 } else { -1.5 }).collect();
        let c = parseval_check(&x).unwrap();
        assert!((c.spectral_sum - 2.25).abs() < 1e-12);
        assert!(c.relative_gap < 1e-12);
    }

    #[test]
    fn parseval_on_noise() {
        for (seed, n) in [(1, 128), (2, 512), (3, 257), (4, 785)] {
            let c = parseval_check(&standard_normals(seed, n)).unwrap();
            assert!(c.relative_gap < 1e-9, "n = {n}: {}", c.relative_gap);
        }
        assert!(matches!(parseval_check(&[1.0; 8]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn too_short_input() {
        assert!(matches!(periodogram(&[1.0, 2.0, 3.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn variance_shares_sum_to_one_on_classical_grid() {
        let x = standard_normals(9, 300);
        let est = periodogram(&x).unwrap();
        let total: f64 = (0..est.len()).map(|i| est.variance_share(i)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
