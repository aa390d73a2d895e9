//! Harmonic models: choose the dominant frequencies of a spectrum, fit
//! cosine/sine amplitudes at them by least squares, and evaluate the sum.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::detrend::PolyTrend;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::spectral::{lomb_scargle, Method, SpectralEstimate};
use crate::time::SampledSeries;

/// Number of harmonics kept by default.
pub const DEFAULT_K: usize = 5;

/// A frequency picked from a spectrum, with its share of the power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFrequency {
    pub freq: f64,
    pub period_months: f64,
    pub power: f64,
    /// power / total power of the estimate
    pub power_share: f64,
    /// bin variance contribution / series variance
    pub variance_share_total: f64,
    /// power / summed power of the selected bins
    pub variance_share_topk: f64,
}

/// The `k` strongest frequencies of `spec`, strongest first; equal powers
/// go to the lower frequency.
///
/// On the Fourier grids of the classical and Welch estimators every bin is
/// a separate candidate. The Lomb-Scargle grid is oversampled, so its
/// neighbouring bins sample the same spectral peak; there only local maxima
/// compete, and other bins are used only if there are fewer than `k` peaks.
pub fn top_k_frequencies(spec: &SpectralEstimate, k: usize) -> Result<Vec<SelectedFrequency>> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let bins = spec.len();
    if bins == 0 {
        return Err(Error::param("empty spectrum"));
    }
    if k > bins {
        return Err(Error::param(format!("k = {k} exceeds {bins} spectral bins")));
    }
    let p = &spec.power;
    let by_power = |a: &usize, b: &usize| p[*b].total_cmp(&p[*a]).then(a.cmp(b));

    let mut ranked: Vec<usize> = (0..bins).collect();
    if spec.method == Method::LombScargle {
        let is_peak = |i: usize| (i == 0 || p[i] >= p[i - 1]) && (i + 1 == bins || p[i] >= p[i + 1]);
        let (mut peaks, mut rest): (Vec<usize>, Vec<usize>) = ranked.into_iter().partition(|&i| is_peak(i));
        peaks.sort_by(by_power);
        rest.sort_by(by_power);
        peaks.extend(rest);
        ranked = peaks;
    } else {
        ranked.sort_by(by_power);
    }
    ranked.truncate(k);
    Ok(annotate(spec, &ranked))
}

fn annotate(spec: &SpectralEstimate, picks: &[usize]) -> Vec<SelectedFrequency> {
    let p = &spec.power;
    let total = spec.total_power();
    let top: f64 = picks.iter().map(|&i| p[i]).sum();
    let share = |x: f64, of: f64| if of > 0.0 { x / of } else { 0.0 };
    picks
        .iter()
        .map(|&i| SelectedFrequency {
            freq: spec.freqs[i],
            period_months: 1.0 / spec.freqs[i],
            power: p[i],
            power_share: share(p[i], total),
            variance_share_total: spec.variance_share(i),
            variance_share_topk: share(p[i], top),
        })
        .collect()
}

/// Sequential selection on a Lomb-Scargle grid: take the strongest bin of
/// the residual spectrum, refit all picks jointly on `series`, subtract,
/// and repeat. Sidelobes of a strong peak disappear with it, so close
/// cycles are not crowded out. `spec` must be the Lomb-Scargle estimate of
/// `series`; picks are annotated with its powers.
pub fn prewhitened_frequencies(series: &SampledSeries, spec: &SpectralEstimate, k: usize) -> Result<Vec<SelectedFrequency>> {
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if spec.method != Method::LombScargle {
        return Err(Error::param("prewhitening needs a Lomb-Scargle estimate"));
    }
    if k > spec.len() {
        return Err(Error::param(format!("k = {k} exceeds {} spectral bins", spec.len())));
    }
    let normalization = spec.lomb_normalization.unwrap_or_default();
    let mut picks: Vec<usize> = Vec::with_capacity(k);
    let mut residual_power = spec.power.clone();
    loop {
        let best = (0..residual_power.len())
            .filter(|i| !picks.contains(i))
            .min_by(|&a, &b| residual_power[b].total_cmp(&residual_power[a]).then(a.cmp(&b)))
            .expect("k <= bins");
        picks.push(best);
        if picks.len() == k {
            break;
        }
        let freqs: Vec<f64> = picks.iter().map(|&i| spec.freqs[i]).collect();
        let model = fit_harmonics(series, &freqs)?;
        let residual: Vec<f64> = series
            .values()
            .iter()
            .zip(reconstruct(&model, series.times(), false))
            .map(|(x, m)| x - m)
            .collect();
        let next = lomb_scargle(&series.with_values(residual)?, &spec.freqs, normalization)?;
        // Bins that turn degenerate stay out of contention.
        residual_power = if next.len() == spec.len() {
            next.power
        } else {
            spec.freqs
                .iter()
                .map(|f| next.freqs.binary_search_by(|g| g.total_cmp(f)).map_or(0.0, |j| next.power[j]))
                .collect()
        };
    }
    Ok(annotate(spec, &picks))
}

/// `a cos(2π f t) + b sin(2π f t) = A cos(2π f t + φ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub freq: f64,
    pub period_months: f64,
    pub a: f64,
    pub b: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// `(A²/2) / variance` of the series the term was fitted to.
    pub variance_share: f64,
}

impl HarmonicTerm {
    pub fn new(freq: f64, a: f64, b: f64, series_variance: f64) -> Self {
        let amplitude = a.hypot(b);
        Self {
            freq,
            period_months: 1.0 / freq,
            a,
            b,
            amplitude,
            phase: (-b).atan2(a),
            variance_share: if series_variance > 0.0 {
                amplitude * amplitude / 2.0 / series_variance
            } else {
                0.0
            },
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (s, c) = (TAU * self.freq * t).sin_cos();
        self.a * c + self.b * s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicModel {
    pub terms: Vec<HarmonicTerm>,
    pub fit_range: (f64, f64),
    pub attached_trend: Option<PolyTrend>,
}

impl HarmonicModel {
    pub fn empty(fit_range: (f64, f64)) -> Self {
        Self {
            terms: Vec::new(),
            fit_range,
            attached_trend: None,
        }
    }

    pub fn with_trend(mut self, trend: PolyTrend) -> Self {
        self.attached_trend = Some(trend);
        self
    }

    pub fn eval(&self, t: f64, include_trend: bool) -> f64 {
        let harmonic: f64 = self.terms.iter().map(|term| term.eval(t)).sum();
        match (&self.attached_trend, include_trend) {
            (Some(trend), true) => harmonic + trend.eval(t),
            _ => harmonic,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

/// Least-squares fit of `Σ_j a_j cos(2π f_j t) + b_j sin(2π f_j t)` at the
/// series' own (possibly irregular) times. Frequencies are held fixed.
pub fn fit_harmonics(series: &SampledSeries, freqs: &[f64]) -> Result<HarmonicModel> {
    let n = series.len();
    let times = series.times();
    let range = if n > 0 { (times[0], times[n - 1]) } else { (0.0, 0.0) };
    if freqs.is_empty() {
        return Ok(HarmonicModel::empty(range));
    }
    if 2 * freqs.len() >= n {
        return Err(Error::param(format!(
            "{} frequencies need more than {} observations, got {n}",
            freqs.len(),
            2 * freqs.len()
        )));
    }
    if let Some(f) = freqs.iter().find(|&&f| !(f > 0.0 && f <= 0.5)) {
        return Err(Error::param(format!("frequency {f} outside (0, 0.5]")));
    }

    // A sine column that vanishes on every sample (f = 1/2 on integer
    // times) carries no information; its coefficient is pinned to zero.
    let mut columns: Vec<(usize, bool)> = Vec::with_capacity(2 * freqs.len());
    for (j, &f) in freqs.iter().enumerate() {
        columns.push((j, false));
        if times.iter().any(|&t| (TAU * f * t).sin().abs() > 1e-9) {
            columns.push((j, true));
        }
    }
    let cols = columns.len();
    let mut design = Vec::with_capacity(n * cols);
    for &t in times {
        for &(j, is_sin) in &columns {
            let (s, c) = (TAU * freqs[j] * t).sin_cos();
            design.push(if is_sin { s } else { c });
        }
    }
    let coef = least_squares(&design, n, cols, series.values()).map_err(|e| {
        let (j, is_sin) = columns[e.column];
        Error::Rank(format!(
            "{} regressor at frequency {} is collinear with earlier terms",
            if is_sin { "sine" } else { "cosine" },
            freqs[j]
        ))
    })?;

    let mut ab = vec![(0.0, 0.0); freqs.len()];
    for (&(j, is_sin), c) in columns.iter().zip(coef) {
        if is_sin {
            ab[j].1 = c;
        } else {
            ab[j].0 = c;
        }
    }
    let variance = crate::spectral::population_variance(series.values());
    Ok(HarmonicModel {
        terms: freqs
            .iter()
            .zip(ab)
            .map(|(&f, (a, b))| HarmonicTerm::new(f, a, b, variance))
            .collect(),
        fit_range: range,
        attached_trend: None,
    })
}

/// Evaluate the harmonic sum (plus the attached trend when asked) at `times`.
pub fn reconstruct(model: &HarmonicModel, times: &[f64], include_trend: bool) -> Vec<f64> {
    times.iter().map(|&t| model.eval(t, include_trend)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{periodogram, PowerScale};
    use crate::stats::rng::standard_normals;
    use crate::time::YearMonth;
    use std::f64::consts::FRAC_PI_4;

    fn regular(values: Vec<f64>) -> SampledSeries {
        SampledSeries::new(
            YearMonth::new(1960, 1).unwrap(),
            (0..values.len()).map(|t| t as f64).collect(),
            values,
        )
        .unwrap()
    }

    fn spectrum(method: Method, power: Vec<f64>) -> SpectralEstimate {
        let n = power.len();
        SpectralEstimate {
            method,
            scale: PowerScale::Periodogram,
            freqs: (1..=n).map(|j| j as f64 / (2 * n) as f64).collect(),
            power,
            n_effective: 2 * n,
            segments: 1,
            window: None,
            variance_total: 1.0,
            invalid_freqs: Vec::new(),
            lomb_normalization: None,
        }
    }

    #[test]
    fn single_nonzero_bin() {
        let s = spectrum(Method::Classical, vec![0.0, 0.0, 5.0, 0.0]);
        let top = top_k_frequencies(&s, 1).unwrap();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].freq, s.freqs[2]);
        assert_eq!(top[0].power_share, 1.0);
        assert_eq!(top[0].variance_share_topk, 1.0);
    }

    #[test]
    fn ties_go_to_lower_frequency() {
        let s = spectrum(Method::Classical, vec![1.0, 3.0, 0.5, 3.0]);
        assert_eq!(top_k_frequencies(&s, 1).unwrap()[0].freq, s.freqs[1]);
        let s = spectrum(Method::Classical, vec![1.0, 3.0, 3.0, 0.5]);
        assert_eq!(top_k_frequencies(&s, 1).unwrap()[0].freq, s.freqs[1]);
    }

    #[test]
    fn adjacent_bins_compete_on_fourier_grid_but_not_oversampled() {
        let power = vec![0.1, 4.0, 5.0, 4.5, 0.2, 1.0, 0.3];
        let classical = top_k_frequencies(&spectrum(Method::Classical, power.clone()), 2).unwrap();
        assert_eq!(classical[1].power, 4.5);
        let lomb = top_k_frequencies(&spectrum(Method::LombScargle, power), 2).unwrap();
        assert_eq!(lomb[0].power, 5.0);
        assert_eq!(lomb[1].power, 1.0);
    }

    #[test]
    fn lomb_fills_with_non_peaks() {
        let top = top_k_frequencies(&spectrum(Method::LombScargle, vec![1.0, 2.0, 3.0]), 3).unwrap();
        let powers: Vec<f64> = top.iter().map(|s| s.power).collect();
        assert_eq!(powers, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn k_bounds() {
        let s = spectrum(Method::Classical, vec![1.0, 2.0]);
        assert!(top_k_frequencies(&s, 3).is_err());
        assert!(top_k_frequencies(&s, 0).is_err());
    }

    #[test]
    fn exact_cosine_fit() {
        let f = 5.0 / 120.0;
        let s = regular((0..120).map(|t| 3.0 * (TAU * f * t as f64).cos()).collect());
        let m = fit_harmonics(&s, &[f]).unwrap();
        assert!((m.terms[0].a - 3.0).abs() < 1e-8);
        assert!(m.terms[0].b.abs() < 1e-8);
        let back = reconstruct(&m, s.times(), false);
        for (x, y) in back.iter().zip(s.values()) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn shifted_sine_amplitude_and_phase() {
        let f = 1.0 / 37.3;
        let s = regular((0..200).map(|t| 2.0 * (TAU * f * t as f64 + FRAC_PI_4).sin()).collect());
        let m = fit_harmonics(&s, &[f]).unwrap();
        assert!((m.terms[0].amplitude - 2.0).abs() < 1e-8);
        // sin(x + π/4) = cos(x + π/4 - π/2)
        assert!((m.terms[0].phase - (FRAC_PI_4 - std::f64::consts::FRAC_PI_2)).abs() < 1e-8);
    }

    #[test]
    fn fits_irregular_times() {
        let times: Vec<f64> = (0..300).filter(|t| t % 4 != 1).map(f64::from).collect();
        let (f1, f2) = (1.0 / 61.0, 1.0 / 23.0);
        let values: Vec<f64> = times
            .iter()
            .map(|t| 1.5 * (TAU * f1 * t).cos() - 0.7 * (TAU * f2 * t).sin())
            .collect();
        let s = SampledSeries::new(YearMonth::new(1960, 1).unwrap(), times, values).unwrap();
        let m = fit_harmonics(&s, &[f1, f2]).unwrap();
        assert!((m.terms[0].a - 1.5).abs() < 1e-9 && m.terms[0].b.abs() < 1e-9);
        assert!(m.terms[1].a.abs() < 1e-9 && (m.terms[1].b + 0.7).abs() < 1e-9);
    }

    #[test]
    fn value_at_zero_is_sum_of_cosine_coefficients() {
        let m = HarmonicModel {
            terms: vec![HarmonicTerm::new(0.01, 1.25, -3.0, 1.0), HarmonicTerm::new(0.2, -0.5, 7.0, 1.0)],
            fit_range: (0.0, 10.0),
            attached_trend: None,
        };
        assert!((reconstruct(&m, &[0.0], false)[0] - 0.75).abs() < 1e-15);
        // A cos(φ) = a
        for term in &m.terms {
            assert!((term.amplitude * term.phase.cos() - term.a).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_model_is_zero_and_trend_is_optional() {
        let trend = PolyTrend::new(vec![2.0, 1.0], (0.0, 10.0)).unwrap();
        let m = HarmonicModel::empty((0.0, 10.0)).with_trend(trend);
        assert_eq!(reconstruct(&m, &[0.0, 5.0, 20.0], false), vec![0.0; 3]);
        assert_eq!(reconstruct(&m, &[5.0], true), vec![2.0]);
    }

    #[test]
    fn collinear_frequencies_are_rank_errors() {
        let s = regular(standard_normals(1, 100));
        assert!(matches!(fit_harmonics(&s, &[0.1, 0.1]), Err(Error::Rank(_))));
        // sampled every second month, 0.4 is an alias of 0.1
        let even = SampledSeries::new(
            YearMonth::new(1960, 1).unwrap(),
            (0..60).map(|t| 2.0 * t as f64).collect(),
            standard_normals(2, 60),
        )
        .unwrap();
        assert!(matches!(fit_harmonics(&even, &[0.1, 0.4]), Err(Error::Rank(_))));
        assert!(matches!(fit_harmonics(&s, &[0.0]), Err(Error::Param(_))));
        assert!(matches!(fit_harmonics(&regular(vec![1.0; 4]), &[0.1, 0.2]), Err(Error::Param(_))));
    }

    #[test]
    fn nyquist_term_fits_cosine_only() {
        let s = regular((0..50).map(|t| if t % 2 == 0 { 2.0 } else { -2.0 }).collect());
        let m = fit_harmonics(&s, &[0.5]).unwrap();
        assert!((m.terms[0].a - 2.0).abs() < 1e-12);
        assert_eq!(m.terms[0].b, 0.0);
    }

    #[test]
    fn white_noise_amplitudes_shrink() {
        let n = 1000;
        let bound = 5.0 * (2.0 / n as f64).sqrt();
        let mut ok = 0;
        let trials = 100;
        for seed in 0..trials {
            let s = regular(standard_normals(seed, n));
            let m = fit_harmonics(&s, &[0.013, 0.1, 0.377]).unwrap();
            if m.terms.iter().all(|t| t.amplitude < bound) {
                ok += 1;
            }
        }
        assert!(ok >= 95, "{ok}");
    }

    #[test]
    fn refit_beats_every_single_frequency_subset() {
        let n = 400;
        let freqs = [1.0 / 80.0, 1.0 / 33.0, 1.0 / 12.5];
        let noise = standard_normals(4, n);
        let values: Vec<f64> = (0..n)
            .map(|t| {
                let t = t as f64;
                (TAU * freqs[0] * t).cos() + 0.5 * (TAU * freqs[1] * t).sin() + 0.2 * (TAU * freqs[2] * t).cos() + 0.3 * noise[t as usize]
            })
            .collect();
        let s = regular(values);
        let rss = |m: &HarmonicModel| -> f64 {
            reconstruct(m, s.times(), false).iter().zip(s.values()).map(|(a, b)| (a - b).powi(2)).sum()
        };
        let full = rss(&fit_harmonics(&s, &freqs).unwrap());
        for f in freqs {
            assert!(full <= rss(&fit_harmonics(&s, &[f]).unwrap()));
        }
    }

    #[test]
    fn top_k_is_scale_invariant() {
        let x = standard_normals(12, 256);
        let spec = periodogram(&x).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| v * 37.5).collect();
        let spec2 = periodogram(&scaled).unwrap();
        let f1: Vec<f64> = top_k_frequencies(&spec, 5).unwrap().iter().map(|s| s.freq).collect();
        let f2: Vec<f64> = top_k_frequencies(&spec2, 5).unwrap().iter().map(|s| s.freq).collect();
        assert_eq!(f1, f2);
    }
}
