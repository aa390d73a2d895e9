use std::fmt::Write as _;
use std::path::Path;

use cyclefit::forecast::{forecast, ForecastConfig, ForecastResult};
use cyclefit::harmonics::{HarmonicModel, SelectedFrequency};
use cyclefit::ingest::{deflate, parse_csv, serialize_csv, ShockCalendar};
use cyclefit::metrics::ScoreCard;
use cyclefit::pipeline::{analyze as run_analysis, AnalysisConfig, SpectralChoice};
use cyclefit::spectral::{periodogram, SpectralEstimate};
use cyclefit::stats::rng::GENERATOR;
use cyclefit::stats::{
    acf, box_pierce, first_differences, jarque_bera, ks_test_normal, ljung_box, simulate_random_walk,
    simulate_white_noise, AcfResult, TestReport, DEFAULT_LAGS,
};
use cyclefit::synthetic::ToneFixture;
use cyclefit::{MonthlySeries, SampledSeries, YearMonth};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bundle::{sha256_hex, Bundle, Digest256};
use crate::error::CliError;
use crate::settings::Settings;
use crate::svg::{Chart, Series, Stroke, Style, PALETTE};

/// Files read by a command, digested for the manifest.
#[derive(Default)]
struct Inputs {
    digests: Vec<(String, Digest256)>,
}

impl Inputs {
    fn text(&mut self, role: &str, path: &Path) -> Result<String, CliError> {
        let text = crate::read_text(path)?;
        self.digests.push((
            role.to_string(),
            Digest256 {
                file: path.display().to_string(),
                bytes: text.len(),
                sha256: sha256_hex(text.as_bytes()),
            },
        ));
        Ok(text)
    }

    fn series(&mut self, role: &str, path: &Path, column: Option<&str>) -> Result<MonthlySeries, CliError> {
        let text = self.text(role, path)?;
        let column = match column {
            Some(c) => c.to_string(),
            None => cyclefit::ingest::first_value_column(&text)?,
        };
        Ok(parse_csv(&text, &column)?)
    }

    fn index(&mut self, s: &Settings) -> Result<MonthlySeries, CliError> {
        let path = s.input.as_deref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
        self.series("input", path, s.column.as_deref())
    }

    fn cpi(&mut self, s: &Settings) -> Result<Option<MonthlySeries>, CliError> {
        s.cpi
            .as_deref()
            .map(|p| self.series("cpi", p, s.cpi_column.as_deref()))
            .transpose()
    }

    fn calendar(&mut self, s: &Settings) -> Result<ShockCalendar, CliError> {
        if !s.excise {
            return Ok(ShockCalendar::empty());
        }
        match &s.calendar {
            Some(path) => Ok(ShockCalendar::from_json(&self.text("calendar", path)?)?),
            None => s.excision_calendar(),
        }
    }
}

fn finish(bundle: &mut Bundle, command: &str, settings: &Settings, resolved: Value, inputs: Inputs) {
    let manifest = json!({
        "tool": "cyclefit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "settings": settings,
        "resolved": resolved,
        "seed": settings.seed,
        "generator": GENERATOR,
        "inputs": inputs
            .digests
            .into_iter()
            .map(|(role, d)| json!({"role": role, "file": d.file, "bytes": d.bytes, "sha256": d.sha256}))
            .collect::<Vec<_>>(),
        "outputs": bundle.digests(),
    });
    bundle.add("manifest.json", pretty(&manifest));
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn decimal_year(origin: YearMonth, t: f64) -> f64 {
    origin.year() as f64 + (origin.month() as f64 - 1.0 + t) / 12.0
}

fn monthly_points(series: &MonthlySeries) -> Vec<(f64, f64)> {
    series
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| (decimal_year(series.start(), i as f64), v))
        .collect()
}

fn sampled_points(series: &SampledSeries, values: &[f64]) -> Vec<(f64, f64)> {
    series
        .times()
        .iter()
        .zip(values)
        .map(|(&t, &v)| (decimal_year(series.origin(), t), v))
        .collect()
}

fn sampled_csv(series: &SampledSeries) -> String {
    let mut out = String::from("date,t,value\n");
    for (&t, v) in series.times().iter().zip(series.values()) {
        let _ = writeln!(out, "{},{t},{v}", series.month_at(t));
    }
    out
}

fn topk_csv(selected: &[SelectedFrequency], model: &HarmonicModel) -> String {
    let mut out = String::from(
        "rank,freq,period_months,power,power_share,variance_share_total,variance_share_topk,amplitude,phase,fitted_variance_share\n",
    );
    for (i, (s, term)) in selected.iter().zip(&model.terms).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            i + 1,
            s.freq,
            s.period_months,
            s.power,
            s.power_share,
            s.variance_share_total,
            s.variance_share_topk,
            term.amplitude,
            term.phase,
            term.variance_share
        );
    }
    out
}

fn topk_table(selected: &[SelectedFrequency], model: &HarmonicModel) -> String {
    let mut out = String::from("rank  period (months)  freq (1/month)  share of variance  share of top-k  amplitude\n");
    for (i, (s, term)) in selected.iter().zip(&model.terms).enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:>15.2}  {:>14.6}  {:>16.1}%  {:>13.1}%  {:>9.3}",
            i + 1,
            s.period_months,
            s.freq,
            100.0 * s.variance_share_total,
            100.0 * s.variance_share_topk,
            term.amplitude
        );
    }
    out
}

fn spectrum_chart(title: &str, spec: &SpectralEstimate, selected: &[SelectedFrequency]) -> Chart {
    let curve: Vec<(f64, f64)> = spec.freqs.iter().cloned().zip(spec.power.iter().cloned()).collect();
    let picks: Vec<(f64, f64)> = selected.iter().map(|s| (s.freq, s.power)).collect();
    let mut chart = Chart::new(title, "frequency (cycles per month)", "power")
        .with(Series::line(format!("{} estimate", spec.method), curve, PALETTE[0]));
    if !picks.is_empty() {
        chart = chart.with(Series::line(format!("top {}", picks.len()), picks, PALETTE[1]).styled(Style::Points));
    }
    chart
}

fn resolved_model(order: usize, spectral: &SpectralChoice, k: usize, calendar: &ShockCalendar) -> Value {
    json!({
        "poly_order": order,
        "spectral": spectral,
        "k": k,
        "calendar": calendar,
    })
}

pub fn analyze(s: &Settings) -> Result<Bundle, CliError> {
    let mut inputs = Inputs::default();
    let raw = inputs.index(s)?;
    let cpi = inputs.cpi(s)?;
    let calendar = inputs.calendar(s)?;
    let cfg = AnalysisConfig {
        base: s.base,
        excise: s.excise,
        calendar,
        poly_order: s.poly_order()?,
        spectral: s.spectral("welch")?,
        k: s.k,
    };
    let a = run_analysis(&raw, cpi.as_ref(), &cfg)?;

    let mut b = Bundle::default();
    b.add("deflated.csv", serialize_csv(&a.deflated));
    b.add("trend.json", format!("{}\n", a.trend.to_json()));
    b.add("detrended.csv", sampled_csv(&a.detrended));
    b.add("spectrum.csv", a.spectrum.to_csv());
    b.add("spectrum.json", format!("{}\n", a.spectrum.to_json()));
    b.add("topk.csv", topk_csv(&a.selected, &a.model));
    b.add("topk.txt", topk_table(&a.selected, &a.model));
    b.add("model.json", format!("{}\n", a.model.to_json()));

    let mut recon = String::from("date,t,detrended,harmonic,trend,fitted_level,observed_level\n");
    for (i, &t) in a.detrended.times().iter().enumerate() {
        let trend = a.trend.eval(t);
        let _ = writeln!(
            recon,
            "{},{t},{},{},{trend},{},{}",
            a.detrended.month_at(t),
            a.detrended.values()[i],
            a.reconstruction[i],
            trend + a.reconstruction[i],
            a.sampled.values()[i]
        );
    }
    b.add("reconstruction.csv", recon);
    b.add("scorecard.json", format!("{}\n", a.scores.to_json()));
    b.add(
        "scorecard.txt",
        ScoreCard::table("Detrended series against harmonic reconstruction", &[(
            &a.spectrum.method.to_string(),
            &a.scores,
        )]),
    );

    let trend_line: Vec<(f64, f64)> = (0..a.deflated.len())
        .map(|i| (decimal_year(a.deflated.start(), i as f64), a.trend.eval(i as f64)))
        .collect();
    let mut series_chart = Chart::new(
        format!("{} and polynomial trend (order {})", a.deflated.label(), a.trend.order()),
        "year",
        if cpi.is_some() { "deflated index" } else { "index" },
    )
    .with(Series::line("series", monthly_points(&a.deflated), PALETTE[5]))
    .with(Series::line("trend", trend_line, PALETTE[1]));
    if s.excise && a.sampled.len() < a.deflated.len() {
        series_chart = series_chart.with(
            Series::line("kept after excision", sampled_points(&a.sampled, a.sampled.values()), PALETTE[0])
                .styled(Style::Points),
        );
    }
    b.add("series_trend.svg", series_chart.render());
    b.add(
        "periodogram.svg",
        spectrum_chart("Periodogram of the detrended series", &a.spectrum, &a.selected).render(),
    );
    b.add(
        "reconstruction.svg",
        Chart::new(format!("Reconstruction from {} harmonics", a.model.terms.len()), "year", "detrended value")
            .with(Series::line("detrended", sampled_points(&a.detrended, a.detrended.values()), PALETTE[5]))
            .with(Series::line("model", sampled_points(&a.detrended, &a.reconstruction), PALETTE[0]))
            .render(),
    );

    let resolved = resolved_model(cfg.poly_order, &cfg.spectral, cfg.k, &cfg.calendar);
    finish(&mut b, "analyze", s, resolved, inputs);
    Ok(b)
}

#[derive(Debug, Serialize)]
struct WhiteNoiseReport {
    n: usize,
    lags: usize,
    mean: f64,
    sd: f64,
    band: f64,
    box_pierce: TestReport,
    ljung_box: TestReport,
    kolmogorov_smirnov: TestReport,
    jarque_bera: TestReport,
}

fn white_noise_tests(values: &[f64]) -> Result<(AcfResult, WhiteNoiseReport), CliError> {
    let n = values.len();
    let lags = DEFAULT_LAGS.min(n.saturating_sub(1)).max(1);
    let rho = acf(values, lags)?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    let report = WhiteNoiseReport {
        n,
        lags,
        mean,
        sd,
        band: rho.band(),
        box_pierce: box_pierce(&rho, lags)?,
        ljung_box: ljung_box(&rho, lags)?,
        kolmogorov_smirnov: ks_test_normal(values)?,
        jarque_bera: jarque_bera(values)?,
    };
    Ok((rho, report))
}

fn acf_csv(rho: &AcfResult) -> String {
    let mut out = String::from("lag,rho,lower_band,upper_band\n");
    for (k, r) in rho.rho.iter().enumerate() {
        let _ = writeln!(out, "{k},{r},{},{}", -rho.band(), rho.band());
    }
    out
}

fn correlogram(title: &str, rho: &AcfResult) -> Chart {
    let stems: Vec<(f64, f64)> = rho.rho.iter().enumerate().skip(1).map(|(k, &r)| (k as f64, r)).collect();
    let band = rho.band();
    Chart::new(title, "lag (months)", "autocorrelation")
        .with(Series::line("", stems, PALETTE[0]).styled(Style::Stems))
        .hline(band, "+2/sqrt(n)", Stroke::Dashed)
        .hline(-band, "-2/sqrt(n)", Stroke::Dashed)
        .hline(0.0, "", Stroke::Solid)
}

pub fn rwm_test(s: &Settings) -> Result<Bundle, CliError> {
    let mut inputs = Inputs::default();
    let raw = inputs.index(s)?;
    let series = match inputs.cpi(s)? {
        Some(cpi) => deflate(&raw, &cpi, s.base.unwrap_or(raw.start()))?,
        None => raw,
    };
    let diffs = first_differences(&series)?;
    let (rho, report) = white_noise_tests(diffs.values())?;
    let spec = periodogram(diffs.values())?;

    let sim = simulate_random_walk(series.len(), report.sd, s.seed)?;
    let sim_diffs = first_differences(&sim)?;
    let (sim_rho, sim_report) = white_noise_tests(sim_diffs.values())?;
    let sim_spec = periodogram(sim_diffs.values())?;

    let mut b = Bundle::default();
    b.add("differences.csv", serialize_csv(&diffs.clone().with_label("difference")));
    b.add("acf.csv", acf_csv(&rho));
    b.add("diff_periodogram.csv", spec.to_csv());
    let mut sim_csv = String::from("date,level,difference\n");
    for (i, v) in sim.values().iter().enumerate() {
        let d = if i == 0 { String::new() } else { sim_diffs.values()[i - 1].to_string() };
        let _ = writeln!(sim_csv, "{},{v},{d}", sim.date(i));
    }
    b.add("simulated_rwm.csv", sim_csv);
    b.add("simulated_acf.csv", acf_csv(&sim_rho));
    b.add("simulated_periodogram.csv", sim_spec.to_csv());
    b.add(
        "tests.json",
        pretty(&json!({
            "alpha": 0.05,
            "observed": report,
            "observed_rejects_white_noise": report.ljung_box.rejects(0.05) || report.box_pierce.rejects(0.05),
            "simulated": sim_report,
            "simulated_rejects_white_noise": sim_report.ljung_box.rejects(0.05) || sim_report.box_pierce.rejects(0.05),
            "simulation": {"seed": s.seed, "sigma": report.sd, "n": sim.len(), "generator": GENERATOR},
        })),
    );

    b.add(
        "differences.svg",
        Chart::new("First differences", "year", "change")
            .with(Series::line("observed", monthly_points(&diffs), PALETTE[0]))
            .render(),
    );
    b.add("correlogram.svg", correlogram("Correlogram of first differences", &rho).render());
    b.add("diff_periodogram.svg", spectrum_chart("Periodogram of first differences", &spec, &[]).render());
    b.add(
        "simulated_rwm.svg",
        Chart::new(format!("Simulated random walk (seed {})", s.seed), "year", "level")
            .with(Series::line("simulated", monthly_points(&sim), PALETTE[1]))
            .render(),
    );
    b.add(
        "simulated_correlogram.svg",
        correlogram("Correlogram of simulated random-walk differences", &sim_rho).render(),
    );
    b.add(
        "simulated_periodogram.svg",
        spectrum_chart("Periodogram of simulated random-walk differences", &sim_spec, &[]).render(),
    );

    let resolved = json!({"lags": report.lags, "simulation_sigma": report.sd});
    finish(&mut b, "rwm-test", s, resolved, inputs);
    Ok(b)
}

#[derive(Debug, Serialize)]
struct ForecastSummary {
    cutoff: YearMonth,
    horizon_months: usize,
    training_observations: usize,
    method: String,
    selected_periods: Vec<f64>,
    value_at_cutoff: f64,
    predicted_change_12: Option<f64>,
    observed_change_12: Option<f64>,
    scorecard: Option<ScoreCard>,
}

fn observed_change(r: &ForecastResult, months: usize) -> Option<f64> {
    let cut_t = r.cutoff.months_since(r.training.origin()) as f64;
    let times = r.training_detrended.times();
    let at_cutoff = (times.last() == Some(&cut_t)).then(|| r.training_detrended.values()[times.len() - 1])?;
    let later = (*r.actual_detrended().get(months.checked_sub(1)?)?)?;
    Some(later - at_cutoff)
}

pub fn forecast_cmd(s: &Settings) -> Result<Bundle, CliError> {
    let cutoff = s.cutoff.ok_or_else(|| CliError::Usage("forecast needs --cutoff".into()))?;
    let mut inputs = Inputs::default();
    let raw = inputs.index(s)?;
    let cpi = inputs.cpi(s)?;
    let calendar = inputs.calendar(s)?;
    let cfg = ForecastConfig {
        poly_order: s.poly_order()?,
        k: s.k,
        spectral: s.spectral("lomb")?,
        base: s.base,
        horizon: s.horizon,
    };
    let r = forecast(&raw, cpi.as_ref(), &calendar, cutoff, &cfg)?;
    let score = r.score().transpose()?;

    let mut b = Bundle::default();
    b.add("forecast.csv", r.to_csv());
    b.add("forecast_model.json", format!("{}\n", r.model.to_json()));
    b.add("forecast_topk.csv", topk_csv(&r.selected, &r.model));
    b.add("forecast_topk.txt", topk_table(&r.selected, &r.model));
    b.add("forecast_spectrum.csv", r.spectrum.to_csv());
    b.add("training_detrended.csv", sampled_csv(&r.training_detrended));
    let summary = ForecastSummary {
        cutoff,
        horizon_months: r.horizon_times.len(),
        training_observations: r.training.len(),
        method: r.spectrum.method.to_string(),
        selected_periods: r.selected.iter().map(|x| x.period_months).collect(),
        value_at_cutoff: r.value_at_cutoff(),
        predicted_change_12: r.predicted_change(12),
        observed_change_12: observed_change(&r, 12),
        scorecard: score.clone(),
    };
    b.add("forecast_summary.json", pretty(&summary));
    if let Some(card) = &score {
        b.add("forecast_scorecard.json", format!("{}\n", card.to_json()));
        b.add(
            "forecast_scorecard.txt",
            ScoreCard::table(&format!("Prediction from {cutoff}"), &[(&r.spectrum.method.to_string(), card)]),
        );
    }

    let origin = r.training.origin();
    let cut_x = decimal_year(origin, cutoff.months_since(origin) as f64);
    let horizon_points = |values: &[f64]| -> Vec<(f64, f64)> {
        r.horizon_times
            .iter()
            .zip(values)
            .map(|(&t, &v)| (decimal_year(origin, t), v))
            .collect()
    };
    let actual_detrended: Vec<f64> = r.actual_detrended().iter().map(|a| a.unwrap_or(f64::NAN)).collect();
    let actual_level: Vec<f64> = r.actual.iter().map(|a| a.unwrap_or(f64::NAN)).collect();
    let cutoff_label = format!("Dotted line: {cutoff}");
    b.add(
        "forecast.svg",
        Chart::new(format!("Prediction from {cutoff} (detrended)"), "year", "detrended value")
            .with(Series::line(
                "training data",
                sampled_points(&r.training_detrended, r.training_detrended.values()),
                PALETTE[5],
            ))
            .with(Series::line("actual", horizon_points(&actual_detrended), PALETTE[2]))
            .with(Series::line("prediction", horizon_points(&r.predicted), PALETTE[0]))
            .vline(cut_x, cutoff_label.clone(), Stroke::Dotted)
            .render(),
    );
    b.add(
        "forecast_levels.svg",
        Chart::new(format!("Prediction from {cutoff} with trend"), "year", "level")
            .with(Series::line("training data", sampled_points(&r.training, r.training.values()), PALETTE[5]))
            .with(Series::line("actual", horizon_points(&actual_level), PALETTE[2]))
            .with(Series::line("prediction", horizon_points(&r.predicted_with_trend), PALETTE[0]))
            .vline(cut_x, cutoff_label, Stroke::Dotted)
            .render(),
    );

    let mut resolved = resolved_model(cfg.poly_order, &cfg.spectral, cfg.k, &calendar);
    resolved["cutoff"] = json!(cutoff);
    resolved["horizon"] = json!(r.horizon_times.len());
    finish(&mut b, "forecast", s, resolved, inputs);
    Ok(b)
}

pub fn simulate(s: &Settings) -> Result<Bundle, CliError> {
    let series = match s.kind.as_str() {
        "rwm" | "random-walk" => simulate_random_walk(s.n, s.sigma, s.seed)?,
        "white-noise" | "wn" => simulate_white_noise(s.n, s.sigma, s.seed)?,
        "tones" => {
            let mut fx = ToneFixture::us_like(s.seed);
            fx.n = s.n;
            fx.build()?
        }
        "downturn" => ToneFixture::downturn(s.seed, 618.0).build()?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown kind {other:?} (rwm, white-noise, tones, downturn)"
            )))
        }
    };
    let series = series.with_label("value");
    let mut b = Bundle::default();
    b.add("simulated.csv", serialize_csv(&series));
    b.add(
        "simulated.svg",
        Chart::new(format!("Simulated {} (seed {})", s.kind, s.seed), "year", "value")
            .with(Series::line("", monthly_points(&series), PALETTE[0]))
            .render(),
    );
    let resolved = json!({"kind": s.kind, "n": series.len(), "start": series.start()});
    finish(&mut b, "simulate", s, resolved, Inputs::default());
    Ok(b)
}
