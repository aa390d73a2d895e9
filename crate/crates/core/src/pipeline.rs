//! End-to-end model estimation: deflate, excise, detrend, estimate the
//! spectrum, keep the top-k harmonics and score the reconstruction.

use serde::{Deserialize, Serialize};

use crate::detrend::{detrend, fit_polynomial, PolyTrend};
use crate::error::{Error, Result};
use crate::harmonics::{
    fit_harmonics, prewhitened_frequencies, reconstruct, top_k_frequencies, HarmonicModel, SelectedFrequency,
};
use crate::ingest::{deflate, excise, ShockCalendar};
use crate::metrics::ScoreCard;
use crate::spectral::{
    lomb_grid, lomb_scargle, periodogram, welch, LombNormalization, Method, SpectralEstimate, WelchParams, WindowKind,
    DEFAULT_OVERSAMPLING,
};
use crate::time::{MonthlySeries, SampledSeries, YearMonth};

/// Upper bound on the number of harmonics a model may keep.
pub const MAX_K: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SpectralChoice {
    Classical,
    Welch {
        /// `None` means half the series length.
        segment_length: Option<usize>,
        overlap: f64,
        window: WindowKind,
    },
    LombScargle {
        oversampling: f64,
        normalization: LombNormalization,
    },
}

impl SpectralChoice {
    pub fn welch_defaults() -> Self {
        SpectralChoice::Welch {
            segment_length: None,
            overlap: 0.5,
            window: WindowKind::Hanning,
        }
    }

    pub fn lomb_defaults() -> Self {
        SpectralChoice::LombScargle {
            oversampling: DEFAULT_OVERSAMPLING,
            normalization: LombNormalization::PsdEquivalent,
        }
    }
}

impl Default for SpectralChoice {
    fn default() -> Self {
        Self::welch_defaults()
    }
}

/// Spectrum of `series` by the requested method. Fourier-grid methods need
/// regular sampling; irregular series always go through Lomb-Scargle with
/// the default grid.
pub fn estimate_spectrum(series: &SampledSeries, choice: SpectralChoice) -> Result<SpectralEstimate> {
    let lomb = |oversampling: f64, normalization| {
        let grid = lomb_grid(series.times(), oversampling, 0.5)?;
        lomb_scargle(series, &grid, normalization)
    };
    if !series.is_regular() {
        return match choice {
            SpectralChoice::LombScargle {
                oversampling,
                normalization,
            } => lomb(oversampling, normalization),
            _ => lomb(DEFAULT_OVERSAMPLING, LombNormalization::PsdEquivalent),
        };
    }
    match choice {
        SpectralChoice::Classical => periodogram(series.values()),
        SpectralChoice::Welch {
            segment_length,
            overlap,
            window,
        } => {
            let params = WelchParams {
                segment_length: segment_length.unwrap_or(series.len() / 2),
                overlap,
                window,
            };
            welch(series.values(), params)
        }
        SpectralChoice::LombScargle {
            oversampling,
            normalization,
        } => lomb(oversampling, normalization),
    }
}

/// Frequency resolution of an estimate: one Fourier bin for the classical
/// and Welch grids, `1 / span` for Lomb-Scargle.
pub fn resolution(spec: &SpectralEstimate, series: &SampledSeries) -> f64 {
    match spec.method {
        Method::Classical | Method::Welch => 1.0 / spec.n_effective as f64,
        Method::LombScargle => {
            let t = series.times();
            1.0 / (t[t.len() - 1] - t[0])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Deflation base month; defaults to the first month of the index.
    pub base: Option<YearMonth>,
    pub excise: bool,
    pub calendar: ShockCalendar,
    pub poly_order: usize,
    pub spectral: SpectralChoice,
    pub k: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            base: None,
            excise: false,
            calendar: ShockCalendar::empty(),
            poly_order: 5,
            spectral: SpectralChoice::default(),
            k: crate::harmonics::DEFAULT_K,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if self.poly_order > crate::detrend::MAX_ORDER {
            return Err(Error::param(format!("poly_order {} outside 0..=12", self.poly_order)));
        }
        if self.k > MAX_K {
            return Err(Error::param(format!("k = {} outside 0..={MAX_K}", self.k)));
        }
        Ok(())
    }
}

/// Everything the model pipeline computes for one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub deflated: MonthlySeries,
    /// Deflated levels after excision.
    pub sampled: SampledSeries,
    pub trend: PolyTrend,
    pub detrended: SampledSeries,
    pub spectrum: SpectralEstimate,
    pub selected: Vec<SelectedFrequency>,
    /// Harmonic model with the trend attached.
    pub model: HarmonicModel,
    /// Harmonic sum at the sample times (detrended scale).
    pub reconstruction: Vec<f64>,
    /// Detrended data against the reconstruction.
    pub scores: ScoreCard,
}

pub(crate) fn deflate_if(raw: &MonthlySeries, cpi: Option<&MonthlySeries>, base: Option<YearMonth>) -> Result<MonthlySeries> {
    match cpi {
        Some(cpi) => deflate(raw, cpi, base.unwrap_or(raw.start())),
        None => Ok(raw.clone()),
    }
}

/// Detrended-series stages shared by analysis and forecasting.
pub(crate) struct Fitted {
    pub trend: PolyTrend,
    pub detrended: SampledSeries,
    pub spectrum: SpectralEstimate,
    pub selected: Vec<SelectedFrequency>,
    pub model: HarmonicModel,
}

pub(crate) fn fit_sampled(sampled: &SampledSeries, poly_order: usize, spectral: SpectralChoice, k: usize) -> Result<Fitted> {
    let trend = fit_polynomial(sampled, poly_order)?;
    let detrended = detrend(sampled, &trend)?;
    let spectrum = estimate_spectrum(&detrended, spectral)?;
    let selected = match (k, spectrum.method) {
        (0, _) => Vec::new(),
        (_, Method::LombScargle) => prewhitened_frequencies(&detrended, &spectrum, k)?,
        _ => top_k_frequencies(&spectrum, k)?,
    };
    let freqs: Vec<f64> = selected.iter().map(|s| s.freq).collect();
    let model = fit_harmonics(&detrended, &freqs)?.with_trend(trend.clone());
    Ok(Fitted {
        trend,
        detrended,
        spectrum,
        selected,
        model,
    })
}

pub fn analyze(raw: &MonthlySeries, cpi: Option<&MonthlySeries>, cfg: &AnalysisConfig) -> Result<Analysis> {
    cfg.validate()?;
    let deflated = deflate_if(raw, cpi, cfg.base)?;
    let sampled = if cfg.excise {
        excise(&deflated, &cfg.calendar)?
    } else {
        SampledSeries::from_monthly(&deflated)
    };
    let fitted = fit_sampled(&sampled, cfg.poly_order, cfg.spectral, cfg.k)?;
    let reconstruction = reconstruct(&fitted.model, fitted.detrended.times(), false);
    let scores = ScoreCard::score(fitted.detrended.values(), &reconstruction)?;
    Ok(Analysis {
        deflated,
        sampled,
        trend: fitted.trend,
        detrended: fitted.detrended,
        spectrum: fitted.spectrum,
        selected: fitted.selected,
        model: fitted.model,
        reconstruction,
        scores,
    })
}
