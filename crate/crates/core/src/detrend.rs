//! Polynomial trend fitting and removal.
//!
//! Time is mapped onto `s = (t - t_mid) / t_half`, which puts the fit range
//! on `[-1, 1]`; coefficients are for powers of `s`. Month indices reach the
//! high hundreds, and a raw Vandermonde matrix of order 5 or 6 over them is
//! hopeless to solve accurately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::time::SampledSeries;

pub const MAX_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTrend {
    order: usize,
    coeffs: Vec<f64>,
    fit_range: (f64, f64),
}

impl PolyTrend {
    pub fn new(coeffs: Vec<f64>, fit_range: (f64, f64)) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_ORDER + 1 {
            return Err(Error::param(format!("polynomial needs 1..={} coefficients", MAX_ORDER + 1)));
        }
        if !(fit_range.0 <= fit_range.1) || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("invalid polynomial trend"));
        }
        Ok(Self {
            order: coeffs.len() - 1,
            coeffs,
            fit_range,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients of `s^0, s^1, ..., s^order`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn fit_range(&self) -> (f64, f64) {
        self.fit_range
    }

    pub fn scale(&self, t: f64) -> f64 {
        let (lo, hi) = self.fit_range;
        let half = if hi > lo { (hi - lo) / 2.0 } else { 1.0 };
        (t - (lo + hi) / 2.0) / half
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = self.scale(t);
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.fit_range.0 && t <= self.fit_range.1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trend serializes")
    }
}

/// Trend values plus whether any requested time lay outside the fit range.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendValues {
    pub values: Vec<f64>,
    pub extrapolated: bool,
}

/// Least-squares polynomial of the given order through `series`.
pub fn fit_polynomial(series: &SampledSeries, order: usize) -> Result<PolyTrend> {
    if order > MAX_ORDER {
        return Err(Error::param(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let n = series.len();
    if n <= order {
        return Err(Error::Rank(format!("{n} observations cannot determine an order-{order} polynomial")));
    }
    let times = series.times();
    let range = (times[0], times[n - 1]);
    let proto = PolyTrend::new(vec![0.0; order + 1], range)?;

    let cols = order + 1;
    let mut design = Vec::with_capacity(n * cols);
    for &t in times {
        let s = proto.scale(t);
        let mut p = 1.0;
        for _ in 0..cols {
            design.push(p);
            p *= s;
        }
    }
    let coeffs = least_squares(&design, n, cols, series.values()).map_err(|e| {
        Error::Conditioning(format!(
            "power s^{} is numerically dependent on lower powers (relative pivot {:.2e})",
            e.column, e.ratio
        ))
    })?;
    PolyTrend::new(coeffs, range)
}

/// Subtract `trend` from `series`; times are unchanged.
pub fn detrend(series: &SampledSeries, trend: &PolyTrend) -> Result<SampledSeries> {
    let values = series
        .times()
        .iter()
        .zip(series.values())
        .map(|(&t, &v)| v - trend.eval(t))
        .collect();
    series.with_values(values)
}

pub fn evaluate_trend(trend: &PolyTrend, times: &[f64]) -> TrendValues {
    TrendValues {
        values: times.iter().map(|&t| trend.eval(t)).collect(),
        extrapolated: times.iter().any(|&t| !trend.contains(t)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::YearMonth;

    fn sampled(times: Vec<f64>, values: Vec<f64>) -> SampledSeries {
        SampledSeries::new(YearMonth::new(2000, 1).unwrap(), times, values).unwrap()
    }

    fn regular(values: Vec<f64>) -> SampledSeries {
        sampled((0..values.len()).map(|t| t as f64).collect(), values)
    }

    #[test]
    fn constant_series_any_order() {
        for order in 0..6 {
            let trend = fit_polynomial(&regular(vec![4.5; 20]), order).unwrap();
            for t in 0..20 {
                assert!((trend.eval(t as f64) - 4.5).abs() < 1e-10, "order {order}");
            }
        }
    }

    #[test]
    fn exact_linear_data() {
        let s = regular((0..10).map(|t| 2.0 * t as f64 + 3.0).collect());
        let trend = fit_polynomial(&s, 1).unwrap();
        let resid = detrend(&s, &trend).unwrap();
        assert!(resid.values().iter().all(|r| r.abs() < 1e-9));
        let mean = resid.values().iter().sum::<f64>() / 10.0;
        assert!(mean.abs() < 1e-10);
    }

    #[test]
    fn linear_extrapolation() {
        let trend = fit_polynomial(&sampled(vec![0.0, 10.0], vec![0.0, 10.0]), 1).unwrap();
        let out = evaluate_trend(&trend, &[5.0, 20.0]);
        assert!((out.values[1] - 20.0).abs() < 1e-12);
        assert!(out.extrapolated);
        assert!(!evaluate_trend(&trend, &[0.0, 10.0]).extrapolated);
    }

    #[test]
    fn order_zero_trend() {
        let trend = PolyTrend::new(vec![7.0], (0.0, 5.0)).unwrap();
        assert_eq!(evaluate_trend(&trend, &[-100.0, 3.0, 1e4]).values, vec![7.0; 3]);
        let zero = PolyTrend::new(vec![0.0], (0.0, 5.0)).unwrap();
        let s = regular(vec![1.0, -2.0, 3.5]);
        assert_eq!(detrend(&s, &zero).unwrap(), s);
    }

    #[test]
    fn series_equal_to_trend_detrends_to_zero() {
        let trend = PolyTrend::new(vec![1.0, -0.5, 0.25, 2.0], (0.0, 30.0)).unwrap();
        let times: Vec<f64> = (0..31).map(f64::from).collect();
        let s = sampled(times.clone(), evaluate_trend(&trend, &times).values);
        assert!(detrend(&s, &trend).unwrap().values().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn order_five_round_trip_on_irregular_times() {
        let times: Vec<f64> = (0..200).filter(|t| t % 7 != 3).map(f64::from).collect();
        let values: Vec<f64> = times.iter().map(|t| (t / 40.0).sin() * 10.0 + t * 0.05).collect();
        let s = sampled(times.clone(), values);
        let trend = fit_polynomial(&s, 5).unwrap();
        let resid = detrend(&s, &trend).unwrap();
        let evaluated = evaluate_trend(&trend, &times);
        for ((v, r), e) in s.values().iter().zip(resid.values()).zip(&evaluated.values) {
            assert!((v - r - e).abs() < 1e-10);
        }
    }

    #[test]
    fn underdetermined_and_out_of_range_orders() {
        let s = regular(vec![1.0, 2.0, 3.0]);
        assert!(matches!(fit_polynomial(&s, 3), Err(Error::Rank(_))));
        assert!(matches!(fit_polynomial(&s, 13), Err(Error::Param(_))));
    }

    #[test]
    fn trend_json_shape() {
        let trend = PolyTrend::new(vec![1.0, 2.0], (0.0, 9.0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&trend.to_json()).unwrap();
        assert_eq!(v["order"], 1);
        assert_eq!(v["coeffs"][1], 2.0);
        assert_eq!(v["fit_range"][1], 9.0);
    }
}
