//! Settings resolution: defaults, then the `--config` JSON file, then flags.

use std::path::{Path, PathBuf};

use cyclefit::ingest::{builtin_calendar, Country, ShockCalendar};
use cyclefit::pipeline::SpectralChoice;
use cyclefit::spectral::{LombNormalization, WindowKind};
use cyclefit::YearMonth;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub input: Option<PathBuf>,
    pub column: Option<String>,
    pub cpi: Option<PathBuf>,
    pub cpi_column: Option<String>,
    pub base: Option<YearMonth>,
    pub country: Option<String>,
    pub calendar: Option<PathBuf>,
    pub excise: bool,
    pub order: Option<usize>,
    pub method: Option<String>,
    pub segment: Option<usize>,
    pub overlap: f64,
    pub window: String,
    pub oversampling: f64,
    pub normalization: String,
    pub k: usize,
    pub cutoff: Option<YearMonth>,
    pub horizon: Option<usize>,
    pub kind: String,
    pub n: usize,
    pub sigma: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            input: None,
            column: None,
            cpi: None,
            cpi_column: None,
            base: None,
            country: None,
            calendar: None,
            excise: false,
            order: None,
            method: None,
            segment: None,
            overlap: 0.5,
            window: "hanning".into(),
            oversampling: cyclefit::spectral::DEFAULT_OVERSAMPLING,
            normalization: "psd_equivalent".into(),
            k: cyclefit::harmonics::DEFAULT_K,
            cutoff: None,
            horizon: None,
            kind: "rwm".into(),
            n: 786,
            sigma: 1.0,
            seed: 1,
            out: PathBuf::from("out"),
        }
    }
}

impl Settings {
    /// Overlay `flags` (a JSON object of the flags actually given) on the
    /// optional config file.
    pub fn resolve(config: Option<&Path>, flags: Value) -> Result<Self, CliError> {
        let mut merged = match config {
            Some(path) => {
                let text = crate::read_text(path)?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(map)) => map,
                    Ok(_) => return Err(CliError::Usage(format!("{}: config must be a JSON object", path.display()))),
                    Err(e) => return Err(CliError::Usage(format!("{}: {e}", path.display()))),
                }
            }
            None => Map::new(),
        };
        if let Value::Object(map) = flags {
            merged.extend(map);
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("settings: {e}")))
    }

    pub fn country(&self) -> Result<Option<Country>, CliError> {
        self.country.as_deref().map(str::parse).transpose().map_err(CliError::Core)
    }

    pub fn poly_order(&self) -> Result<usize, CliError> {
        Ok(match (self.order, self.country()?) {
            (Some(order), _) => order,
            (None, Some(country)) => country.default_trend_order(),
            (None, None) => 5,
        })
    }

    /// The calendar file if given, else the country's built-in calendar,
    /// else none.
    pub fn calendar(&self) -> Result<ShockCalendar, CliError> {
        if let Some(path) = &self.calendar {
            return ShockCalendar::from_json(&crate::read_text(path)?).map_err(CliError::Core);
        }
        Ok(self.country()?.map_or_else(ShockCalendar::empty, builtin_calendar))
    }

    /// Calendar to excise with, or an empty one when excision is off.
    pub fn excision_calendar(&self) -> Result<ShockCalendar, CliError> {
        if !self.excise {
            return Ok(ShockCalendar::empty());
        }
        if self.calendar.is_none() && self.country.is_none() {
            return Err(CliError::Usage("--excise needs --country or --calendar".into()));
        }
        self.calendar()
    }

    /// Spectral estimator; `fallback` names the method used when none is set.
    pub fn spectral(&self, fallback: &str) -> Result<SpectralChoice, CliError> {
        let window: WindowKind = self.window.parse().map_err(CliError::Core)?;
        let normalization = match self.normalization.as_str() {
            "psd_equivalent" | "psd" => LombNormalization::PsdEquivalent,
            "raw" => LombNormalization::Raw,
            other => return Err(CliError::Usage(format!("unknown normalization {other:?}"))),
        };
        match self.method.as_deref().unwrap_or(fallback) {
            "classical" => Ok(SpectralChoice::Classical),
            "welch" => Ok(SpectralChoice::Welch {
                segment_length: self.segment,
                overlap: self.overlap,
                window,
            }),
            "lomb" | "lomb-scargle" | "lomb_scargle" => Ok(SpectralChoice::LombScargle {
                oversampling: self.oversampling,
                normalization,
            }),
            other => Err(CliError::Usage(format!("unknown method {other:?} (classical, welch, lomb)"))),
        }
    }
}
