//! Lomb-Scargle periodogram for irregularly spaced samples.
//!
//! For angular frequency ω the time offset τ solves
//! `tan(2ωτ) = Σ sin(2ω t_i) / Σ cos(2ω t_i)`, which decouples the sine and
//! cosine regressors. With `θ = ωτ` and `R = |Σ exp(2iω t_i)|` the two
//! normalising sums are `Σcos²(ω t_i - θ) = (N + R)/2` and
//! `Σsin²(ω t_i - θ) = (N - R)/2`, so a single pass over the samples is
//! enough per frequency.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{mean, population_variance, Method, PowerScale, SpectralEstimate};
use crate::error::{Error, Result};
use crate::time::SampledSeries;

pub const DEFAULT_OVERSAMPLING: f64 = 4.0;

/// A quadrature sum below this fraction of N counts as degenerate.
const DEGENERATE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LombNormalization {
    /// `½ [C²/ΣCC + S²/ΣSS]`; a bin where either quadrature sum vanishes
    /// is reported invalid.
    Raw,
    /// Same as raw wherever both quadratures exist. Where one vanishes (the
    /// Nyquist frequency of an integer grid) the remaining one-parameter
    /// fit is used unhalved, which reproduces the classical periodogram on
    /// regular sampling at every Fourier frequency.
    #[default]
    PsdEquivalent,
}

/// `k · df` for `k = 1, 2, ...` up to `max_freq`, with
/// `df = 1 / (oversampling · (t_max - t_min))`.
pub fn lomb_grid(times: &[f64], oversampling: f64, max_freq: f64) -> Result<Vec<f64>> {
    if times.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: times.len(),
        });
    }
    let span = times[times.len() - 1] - times[0];
    if !(span > 0.0) || !(oversampling >= 1.0) || !(max_freq > 0.0) {
        return Err(Error::param("grid needs positive span, oversampling >= 1 and max_freq > 0"));
    }
    let df = 1.0 / (oversampling * span);
    let count = (max_freq / df + 1e-9).floor() as usize;
    Ok((1..=count).map(|k| k as f64 * df).collect())
}

pub fn lomb_scargle(series: &SampledSeries, freqs: &[f64], normalization: LombNormalization) -> Result<SpectralEstimate> {
    let n = series.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    if freqs.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
        return Err(Error::param("Lomb-Scargle frequencies must be positive and finite"));
    }
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("Lomb-Scargle frequencies must be strictly increasing"));
    }
    let times = series.times();
    let m = mean(series.values());
    let centred: Vec<f64> = series.values().iter().map(|v| v - m).collect();

    let bins: Vec<Option<f64>> = freqs
        .par_chunks(CHUNK)
        .flat_map_iter(|chunk| chunk_powers(times, &centred, chunk, normalization))
        .collect();

    let mut out_freqs = Vec::with_capacity(freqs.len());
    let mut power = Vec::with_capacity(freqs.len());
    let mut invalid = Vec::new();
    for (&f, p) in freqs.iter().zip(bins) {
        match p {
            Some(p) => {
                out_freqs.push(f);
                power.push(p);
            }
            None => invalid.push(f),
        }
    }
    Ok(SpectralEstimate {
        method: Method::LombScargle,
        scale: PowerScale::Periodogram,
        freqs: out_freqs,
        power,
        n_effective: n,
        segments: 1,
        window: None,
        variance_total: population_variance(series.values()),
        invalid_freqs: invalid,
        lomb_normalization: Some(normalization),
    })
}

/// Frequencies evaluated from one exact set of phasors. Within a chunk of
/// evenly spaced frequencies each sample's phasor is advanced by rotation.
const CHUNK: usize = 64;

fn chunk_powers(times: &[f64], centred: &[f64], freqs: &[f64], normalization: LombNormalization) -> Vec<Option<f64>> {
    let step = if freqs.len() > 1 { freqs[1] - freqs[0] } else { 0.0 };
    let even = freqs
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step);
    if !even {
        return freqs
            .iter()
            .map(|&f| {
                let omega = TAU * f;
                let phasors = times.iter().map(|&t| (omega * t).sin_cos());
                bin_power(phasors, centred, normalization)
            })
            .collect();
    }
    let mut phase: Vec<(f64, f64)> = times.iter().map(|&t| (TAU * freqs[0] * t).sin_cos()).collect();
    let rotate: Vec<(f64, f64)> = times.iter().map(|&t| (TAU * step * t).sin_cos()).collect();
    let mut out = Vec::with_capacity(freqs.len());
    for k in 0..freqs.len() {
        if k > 0 {
            for (p, r) in phase.iter_mut().zip(&rotate) {
                *p = (p.0 * r.1 + p.1 * r.0, p.1 * r.1 - p.0 * r.0);
            }
        }
        out.push(bin_power(phase.iter().copied(), centred, normalization));
    }
    out
}

/// Power at one frequency from the `(sin, cos)` of `ω t_i`.
fn bin_power(phasors: impl Iterator<Item = (f64, f64)>, centred: &[f64], normalization: LombNormalization) -> Option<f64> {
    let (mut xc, mut xs, mut c2, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for ((s, c), &x) in phasors.zip(centred) {
        xc += x * c;
        xs += x * s;
        c2 += c * c - s * s;
        s2 += 2.0 * s * c;
    }
    let n = centred.len() as f64;
    let r = c2.hypot(s2);
    let theta = 0.5 * s2.atan2(c2);
    let (st, ct) = theta.sin_cos();
    let cos_term = ct * xc + st * xs;
    let sin_term = ct * xs - st * xc;
    let cc = 0.5 * (n + r);
    let ss = 0.5 * (n - r);

    let cos_ok = cc > DEGENERATE * n;
    let sin_ok = ss > DEGENERATE * n;
    let p = match (cos_ok, sin_ok, normalization) {
        (true, true, _) => 0.5 * (cos_term * cos_term / cc + sin_term * sin_term / ss),
        (true, false, LombNormalization::PsdEquivalent) => cos_term * cos_term / cc,
        (false, true, LombNormalization::PsdEquivalent) => sin_term * sin_term / ss,
        _ => return None,
    };
    Some(p.max(0.0))
}
