use cyclefit::error::ErrorFamily;
use cyclefit::forecast::{forecast, ForecastConfig, MIN_HISTORY};
use cyclefit::harmonics::reconstruct;
use cyclefit::ingest::{builtin_calendar, Country, ShockCalendar};
use cyclefit::metrics::smape;
use cyclefit::stats::rng::draw_unit;
use cyclefit::synthetic::ToneFixture;
use cyclefit::{MonthlySeries, YearMonth};

fn july_2008() -> YearMonth {
    YearMonth::new(2008, 7).unwrap()
}

fn no_shocks() -> ShockCalendar {
    ShockCalendar::empty()
}

#[test]
fn harmonic_forecast_beats_zero_forecast() {
    for seed in 0..10 {
        let series = ToneFixture::us_like(seed).build().unwrap();
        let cutoff = series.date(series.len() * 4 / 5);
        let r = forecast(&series, None, &no_shocks(), cutoff, &ForecastConfig::default()).unwrap();
        let actual: Vec<f64> = r.actual_detrended().into_iter().map(Option::unwrap).collect();
        let model = smape(&actual, &r.predicted).unwrap();
        let zero = smape(&actual, &vec![0.0; actual.len()]).unwrap();
        assert!(model < zero, "seed {seed}: {model} vs {zero}");
    }
}

#[test]
fn downturn_direction() {
    let cutoff_index = 618.0;
    let hits = (0..20)
        .filter(|&seed| {
            let series = ToneFixture::downturn(seed, cutoff_index).build().unwrap();
            assert_eq!(series.date(618), july_2008());
            let r = forecast(&series, None, &no_shocks(), july_2008(), &ForecastConfig::default()).unwrap();
            r.predicted_change(12).unwrap() < 0.0
        })
        .count();
    assert!(hits >= 18, "{hits} of 20");
}

#[test]
fn k_zero_is_the_trend() {
    let series = ToneFixture::us_like(1).build().unwrap();
    let cfg = ForecastConfig {
        k: 0,
        ..Default::default()
    };
    let r = forecast(&series, None, &no_shocks(), july_2008(), &cfg).unwrap();
    assert!(r.model.terms.is_empty());
    assert!(r.predicted.iter().all(|&v| v == 0.0));
    let trend = r.model.attached_trend.as_ref().unwrap();
    for (p, &t) in r.predicted_with_trend.iter().zip(&r.horizon_times) {
        assert_eq!(*p, trend.eval(t));
    }
}

#[test]
fn post_cutoff_data_never_reaches_the_model() {
    let series = ToneFixture::us_like(4).build().unwrap();
    let cutoff = july_2008();
    let cut = series.index_of(cutoff).unwrap();
    let calendar = builtin_calendar(Country::Us);
    let cfg = ForecastConfig::default();
    let base = forecast(&series, None, &calendar, cutoff, &cfg).unwrap();
    for m in 0..10u64 {
        let mut values = series.values().to_vec();
        let i = cut + 1 + (draw_unit(99, m) * (values.len() - cut - 1) as f64) as usize;
        values[i] *= 1.0 + 10.0 * draw_unit(100, m);
        let mutated = MonthlySeries::new(series.start(), values, "mutated").unwrap();
        let r = forecast(&mutated, None, &calendar, cutoff, &cfg).unwrap();
        assert_eq!(r.model.to_json(), base.model.to_json());
        assert_eq!(r.predicted, base.predicted);
    }
}

#[test]
fn excised_training_uses_lomb_scargle_and_extrapolates() {
    let series = ToneFixture::us_like(2).build().unwrap();
    let cfg = ForecastConfig {
        spectral: cyclefit::pipeline::SpectralChoice::Classical,
        ..Default::default()
    };
    let r = forecast(&series, None, &builtin_calendar(Country::Us), july_2008(), &cfg).unwrap();
    assert_eq!(r.spectrum.method, cyclefit::spectral::Method::LombScargle);
    assert!(r.horizon_times.iter().all(|&t| t > r.model.fit_range.1));
    let again = reconstruct(&r.model, &r.horizon_times, false);
    assert_eq!(again, r.predicted);
}

#[test]
fn precondition_failures_are_parameter_errors() {
    let series = ToneFixture::us_like(0).build().unwrap();
    let cfg = ForecastConfig::default();
    let short = series.date(MIN_HISTORY - 1);
    let last = series.end();
    let outside = series.end().add_months(3);
    for cutoff in [short, last, outside] {
        let err = forecast(&series, None, &no_shocks(), cutoff, &cfg).unwrap_err();
        assert_eq!(err.family(), ErrorFamily::Parameter, "{cutoff}: {err}");
    }
    assert!(forecast(&series, None, &no_shocks(), series.date(MIN_HISTORY), &cfg).is_ok());
}

#[test]
fn horizon_limits_prediction_and_marks_missing_actuals() {
    let series = ToneFixture::us_like(0).build().unwrap();
    let cutoff = series.date(series.len() - 6);
    let cfg = ForecastConfig {
        horizon: Some(12),
        ..Default::default()
    };
    let r = forecast(&series, None, &no_shocks(), cutoff, &cfg).unwrap();
    assert_eq!(r.predicted.len(), 12);
    assert_eq!(r.actual.iter().filter(|a| a.is_some()).count(), 5);
    assert!(r.score().unwrap().is_ok());
    assert_eq!(r.to_csv().lines().count(), 13);
}
