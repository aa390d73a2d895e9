use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "cyclefit", version, about = "Spectral analysis and harmonic forecasting of monthly stock indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Deflate, detrend, estimate the spectrum and fit the top-k harmonics.
    Analyze {
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        model: ModelFlags,
    },
    /// Test first differences for white noise; compare with a simulated random walk.
    #[command(name = "rwm-test")]
    RwmTest {
        #[command(flatten)]
        data: DataFlags,
    },
    /// Fit on data through the cutoff month and predict the months after it.
    Forecast {
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        model: ModelFlags,
        #[command(flatten)]
        forecast: ForecastFlags,
    },
    /// Write a seeded synthetic series.
    Simulate {
        #[command(flatten)]
        sim: SimulateFlags,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::RwmTest { .. } => "rwm-test",
            Command::Forecast { .. } => "forecast",
            Command::Simulate { .. } => "simulate",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DataFlags {
    /// JSON file with settings; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Index CSV: a date column (YYYY-MM or YYYY:MM) then value columns.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Value column of the index CSV [default: second column].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    /// Consumer price index CSV used for deflation.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cpi: Option<PathBuf>,
    /// Value column of the CPI CSV [default: second column].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cpi_column: Option<String>,
    /// Deflation base month [default: first month of the index].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Seed for simulated comparison series.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelFlags {
    /// Market (us, japan, germany): selects the shock calendar and trend order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    /// Shock calendar JSON, replacing the country's built-in calendar.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calendar: Option<PathBuf>,
    /// Remove shock windows before fitting.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excise: Option<bool>,
    /// Polynomial trend order, 0..=12 [default: 5, or the country's order].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Spectral estimator: classical, welch or lomb.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Welch segment length [default: half the series].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub segment: Option<usize>,
    /// Welch overlap fraction in [0, 0.9] [default: 0.5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overlap: Option<f64>,
    /// Welch window: rect or hanning [default: hanning].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    /// Lomb-Scargle grid oversampling [default: 4].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oversampling: Option<f64>,
    /// Lomb-Scargle normalization: psd_equivalent or raw.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<String>,
    /// Number of harmonics kept, 0..=64 [default: 5].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ForecastFlags {
    /// Last month used for fitting.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<String>,
    /// Months to predict [default: the rest of the series].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateFlags {
    /// JSON file with settings; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// rwm, white-noise, tones (five-cycle fixture) or downturn.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    /// Number of months [default: 786; the downturn fixture is fixed at 787].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Innovation standard deviation for rwm and white-noise.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}
