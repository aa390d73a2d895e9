//! Welch's averaged, windowed periodogram.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dft, mean, population_variance, Method, PowerScale, SpectralEstimate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Rectangular,
    Hanning,
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" | "rectangular" => Ok(WindowKind::Rectangular),
            "hanning" | "hann" => Ok(WindowKind::Hanning),
            other => Err(Error::param(format!("unknown window {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length: usize,
}

impl WindowSpec {
    /// Hanning: `0.5 (1 - cos(2π t / (L - 1)))`, `t = 0..L-1`.
    pub fn weights(&self) -> Vec<f64> {
        let l = self.length;
        match self.kind {
            WindowKind::Rectangular => vec![1.0; l],
            WindowKind::Hanning if l < 2 => vec![1.0; l],
            WindowKind::Hanning => (0..l)
                .map(|t| 0.5 * (1.0 - (TAU * t as f64 / (l - 1) as f64).cos()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchParams {
    pub segment_length: usize,
    pub overlap: f64,
    pub window: WindowKind,
}

impl WelchParams {
    /// Half-length segments, 50% overlap, Hanning window.
    pub fn defaults_for(n: usize) -> Self {
        Self {
            segment_length: n / 2,
            overlap: 0.5,
            window: WindowKind::Hanning,
        }
    }

    pub fn stride(&self) -> usize {
        ((self.segment_length as f64 * (1.0 - self.overlap)).floor() as usize).max(1)
    }
}

/// Average of mean-removed, windowed segment periodograms, each normalised
/// by the window power `Σw²/L`. Frequencies are `j/L`, `j = 1..=L/2`.
pub fn welch(values: &[f64], params: WelchParams) -> Result<SpectralEstimate> {
    let n = values.len();
    let l = params.segment_length;
    if !(0.0..=0.9).contains(&params.overlap) {
        return Err(Error::param(format!("overlap {} outside [0, 0.9]", params.overlap)));
    }
    if l < 4 {
        return Err(Error::param(format!("segment length {l} below 4")));
    }
    if l > n {
        return Err(Error::param(format!("segment length {l} exceeds series length {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("non-finite sample"));
    }

    let weights = WindowSpec {
        kind: params.window,
        length: l,
    }
    .weights();
    let window_power = weights.iter().map(|w| w * w).sum::<f64>() / l as f64;
    let stride = params.stride();
    let segments = (n - l) / stride + 1;

    let per_segment: Vec<Vec<f64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let seg = &values[s * stride..s * stride + l];
            let m = mean(seg);
            let tapered: Vec<f64> = seg.iter().zip(&weights).map(|(x, w)| (x - m) * w).collect();
            let d = dft(&tapered);
            (1..=l / 2).map(|j| d[j].norm_sqr() / window_power).collect()
        })
        .collect();

    let mut power = vec![0.0; l / 2];
    for seg in &per_segment {
        for (p, v) in power.iter_mut().zip(seg) {
            *p += v;
        }
    }
    power.iter_mut().for_each(|p| *p /= segments as f64);

    Ok(SpectralEstimate {
        method: Method::Welch,
        scale: PowerScale::Periodogram,
        freqs: (1..=l / 2).map(|j| j as f64 / l as f64).collect(),
        power,
        n_effective: l,
        segments,
        window: Some(params.window),
        variance_total: population_variance(values),
        invalid_freqs: Vec::new(),
        lomb_normalization: None,
    })
}
