//! Synthetic index series with known harmonic content: a polynomial trend
//! plus a handful of cosines plus seeded Gaussian noise.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::rng::{draw_unit, standard_normals};
use crate::time::{MonthlySeries, YearMonth};

/// Dominant cycle lengths (months) reported for the US index.
pub const US_PERIODS: [f64; 5] = [87.3, 98.25, 112.3, 196.5, 262.0];

const PHASE_STREAM: u64 = 0x5048_4153_4553_0001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub period: f64,
    pub amplitude: f64,
    /// Month at which this cosine peaks.
    pub peak_at: f64,
}

impl Tone {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (TAU * (t - self.peak_at) / self.period).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneFixture {
    pub start: YearMonth,
    pub n: usize,
    /// Trend coefficients in powers of `s = 2t/(n-1) - 1`.
    pub trend: Vec<f64>,
    pub tones: Vec<Tone>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl ToneFixture {
    /// 786 months from 1957-01: quintic trend, the five US cycles, noise at
    /// 10% of the smallest amplitude. Phases are drawn from `seed` on a
    /// stream separate from the noise.
    pub fn us_like(seed: u64) -> Self {
        let amplitudes = [9.0, 12.0, 10.0, 11.0, 13.0];
        let tones = US_PERIODS
            .iter()
            .zip(amplitudes)
            .enumerate()
            .map(|(i, (&period, amplitude))| Tone {
                period,
                amplitude,
                peak_at: period * draw_unit(seed ^ PHASE_STREAM, i as u64),
            })
            .collect();
        Self {
            start: YearMonth::new(1957, 1).expect("valid month"),
            n: 786,
            trend: vec![150.0, 120.0, 40.0, -30.0, 25.0, 15.0],
            tones,
            noise_sigma: 0.9,
            seed,
        }
    }

    /// Like [`ToneFixture::us_like`] but with every cycle cresting together
    /// at `crest` months, so the cycle sum falls steeply afterwards.
    pub fn downturn(seed: u64, crest: f64) -> Self {
        let mut fx = Self::us_like(seed);
        fx.n = 787;
        for tone in &mut fx.tones {
            tone.peak_at = crest;
        }
        fx
    }

    pub fn trend_at(&self, t: f64) -> f64 {
        let s = if self.n > 1 {
            2.0 * t / (self.n - 1) as f64 - 1.0
        } else {
            0.0
        };
        self.trend.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn cycles_at(&self, t: f64) -> f64 {
        self.tones.iter().map(|tone| tone.eval(t)).sum()
    }

    pub fn build(&self) -> Result<MonthlySeries> {
        if self.n == 0 {
            return Err(Error::param("fixture length must be positive"));
        }
        let noise = standard_normals(self.seed, self.n);
        let values = (0..self.n)
            .map(|i| {
                let t = i as f64;
                self.trend_at(t) + self.cycles_at(t) + self.noise_sigma * noise[i]
            })
            .collect();
        MonthlySeries::new(self.start, values, "synthetic")
    }
}

/// True when every target period has a selected frequency within `bin`
/// (cycles per month) of its own frequency.
pub fn periods_recovered(selected_freqs: &[f64], target_periods: &[f64], bin: f64) -> bool {
    target_periods.iter().all(|p| {
        let f = 1.0 / p;
        selected_freqs.iter().any(|s| (s - f).abs() <= bin * (1.0 + 1e-9))
    })
}

/// True when the targets can be paired one-to-one with distinct selected
/// frequencies, each pair within `bin`.
pub fn periods_matched(selected_freqs: &[f64], target_periods: &[f64], bin: f64) -> bool {
    fn assign(targets: &[f64], selected: &[f64], used: &mut Vec<bool>, bin: f64) -> bool {
        let Some((&f, rest)) = targets.split_first() else {
            return true;
        };
        for (j, &s) in selected.iter().enumerate() {
            if !used[j] && (s - f).abs() <= bin * (1.0 + 1e-9) {
                used[j] = true;
                if assign(rest, selected, used, bin) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let targets: Vec<f64> = target_periods.iter().map(|p| 1.0 / p).collect();
    assign(&targets, selected_freqs, &mut vec![false; selected_freqs.len()], bin)
}
