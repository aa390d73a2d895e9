//! Spectral analysis of monthly stock-index series.
//!
//! The crate takes a monthly index through deflation and optional removal
//! of shock periods, fits and removes a polynomial trend, estimates the
//! spectrum (classical, Welch or Lomb-Scargle), keeps the strongest
//! harmonics and uses them to reconstruct or forecast the series. The
//! `stats` module tests the random-walk alternative and `metrics` scores
//! fits and forecasts.

pub mod detrend;
pub mod error;
pub mod forecast;
pub mod harmonics;
pub mod ingest;
mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod spectral;
pub mod stats;
pub mod synthetic;
pub mod time;

pub use error::{Error, ErrorFamily, Result};
pub use time::{MonthlySeries, SampledSeries, YearMonth};
