//! Out-of-sample prediction from the harmonics of the pre-cutoff data.
//!
//! Every fitted quantity (deflation, excision, trend, spectrum, harmonic
//! coefficients) is computed from observations up to and including the
//! cutoff month only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{reconstruct, HarmonicModel, SelectedFrequency};
use crate::ingest::{excise, ShockCalendar};
use crate::metrics::ScoreCard;
use crate::pipeline::{deflate_if, fit_sampled, SpectralChoice, MAX_K};
use crate::spectral::SpectralEstimate;
use crate::time::{MonthlySeries, SampledSeries, YearMonth};

/// Months of history required before the cutoff.
pub const MIN_HISTORY: usize = 120;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastConfig {
    pub poly_order: usize,
    pub k: usize,
    pub spectral: SpectralChoice,
    /// Deflation base month; defaults to the first month of the index.
    pub base: Option<YearMonth>,
    /// Months to predict; defaults to the rest of the series.
    pub horizon: Option<usize>,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            poly_order: 5,
            k: crate::harmonics::DEFAULT_K,
            spectral: SpectralChoice::lomb_defaults(),
            base: None,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub cutoff: YearMonth,
    /// Months since the first month of the series.
    pub horizon_times: Vec<f64>,
    pub horizon_dates: Vec<YearMonth>,
    /// Harmonic sum (detrended scale).
    pub predicted: Vec<f64>,
    pub predicted_with_trend: Vec<f64>,
    /// Deflated observations at the horizon months, where available.
    pub actual: Vec<Option<f64>>,
    pub model: HarmonicModel,
    pub selected: Vec<SelectedFrequency>,
    pub spectrum: SpectralEstimate,
    /// Deflated, excised pre-cutoff observations the model was fitted to.
    pub training: SampledSeries,
    pub training_detrended: SampledSeries,
}

impl ForecastResult {
    /// Harmonic sum at the cutoff month itself.
    pub fn value_at_cutoff(&self) -> f64 {
        let t = self.cutoff.months_since(self.training.origin()) as f64;
        self.model.eval(t, false)
    }

    /// Predicted change (detrended scale) from the cutoff to `months` later.
    pub fn predicted_change(&self, months: usize) -> Option<f64> {
        let p = self.predicted.get(months.checked_sub(1)?)?;
        Some(p - self.value_at_cutoff())
    }

    /// Observed minus extrapolated trend, for horizon months with data.
    pub fn actual_detrended(&self) -> Vec<Option<f64>> {
        let trend = self.model.attached_trend.as_ref();
        self.actual
            .iter()
            .zip(&self.horizon_times)
            .map(|(a, &t)| Some(a.as_ref()? - trend.map_or(0.0, |tr| tr.eval(t))))
            .collect()
    }

    /// Detrended actuals against `predicted`, over months with data.
    pub fn score(&self) -> Option<Result<ScoreCard>> {
        let (actual, expected): (Vec<f64>, Vec<f64>) = self
            .actual_detrended()
            .into_iter()
            .zip(&self.predicted)
            .filter_map(|(a, &p)| Some((a?, p)))
            .unzip();
        (!actual.is_empty()).then(|| ScoreCard::score(&actual, &expected))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,actual,predicted,predicted_with_trend\n");
        for i in 0..self.horizon_dates.len() {
            let actual = self.actual[i].map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.horizon_dates[i], actual, self.predicted[i], self.predicted_with_trend[i]
            ));
        }
        out
    }
}

pub fn forecast(
    raw: &MonthlySeries,
    cpi: Option<&MonthlySeries>,
    calendar: &ShockCalendar,
    cutoff: YearMonth,
    cfg: &ForecastConfig,
) -> Result<ForecastResult> {
    if cfg.poly_order > crate::detrend::MAX_ORDER || cfg.k > MAX_K {
        return Err(Error::param("poly_order must be in 0..=12 and k in 0..=64"));
    }
    let cut_idx = raw
        .index_of(cutoff)
        .ok_or_else(|| Error::param(format!("cutoff {cutoff} outside {}..{}", raw.start(), raw.end())))?;
    if cut_idx + 1 >= raw.len() {
        return Err(Error::param(format!("cutoff {cutoff} is the last observation")));
    }
    if cut_idx < MIN_HISTORY {
        return Err(Error::param(format!(
            "cutoff {cutoff} leaves {cut_idx} months of history, need {MIN_HISTORY}"
        )));
    }
    let horizon = cfg.horizon.unwrap_or(raw.len() - cut_idx - 1);
    if horizon == 0 {
        return Err(Error::param("forecast horizon is empty"));
    }

    let history = raw.truncate_through(cutoff)?;
    let deflated = deflate_if(&history, cpi, cfg.base)?;
    let training = excise(&deflated, calendar)?;
    let fitted = fit_sampled(&training, cfg.poly_order, cfg.spectral, cfg.k)?;

    let horizon_times: Vec<f64> = (1..=horizon).map(|h| (cut_idx + h) as f64).collect();
    let horizon_dates: Vec<YearMonth> = (1..=horizon).map(|h| cutoff.add_months(h as i64)).collect();
    let predicted = reconstruct(&fitted.model, &horizon_times, false);
    let predicted_with_trend = reconstruct(&fitted.model, &horizon_times, true);

    // Actuals are reported, never fitted.
    let deflated_full = deflate_if(raw, cpi, cfg.base).ok();
    let actual = horizon_dates
        .iter()
        .map(|&d| deflated_full.as_ref().and_then(|s| s.value_at(d)))
        .collect();

    Ok(ForecastResult {
        cutoff,
        horizon_times,
        horizon_dates,
        predicted,
        predicted_with_trend,
        actual,
        model: fitted.model,
        selected: fitted.selected,
        spectrum: fitted.spectrum,
        training,
        training_detrended: fitted.detrended,
    })
}
