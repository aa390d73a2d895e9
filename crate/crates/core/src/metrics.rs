//! Goodness-of-fit scores for models and forecasts.
//!
//! `actual` is the observed sequence Y, `expected` the model output E.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest |E_t| the chi-squared statistic will divide by.
pub const NEAR_ZERO: f64 = 1e-12;

fn check(actual: &[f64], expected: &[f64]) -> Result<()> {
    if actual.len() != expected.len() {
        return Err(Error::param(format!(
            "length mismatch: {} actual vs {} expected",
            actual.len(),
            expected.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::param("metrics need at least one pair"));
    }
    Ok(())
}

/// Pearson's Σ (Y - E)² / E with n - 1 degrees of freedom, taken literally:
/// negative expectations (detrended data) give negative terms.
pub fn chi_squared(actual: &[f64], expected: &[f64]) -> Result<(f64, usize)> {
    check(actual, expected)?;
    let near_zero: Vec<usize> = expected
        .iter()
        .enumerate()
        .filter(|(_, e)| e.abs() < NEAR_ZERO)
        .map(|(i, _)| i)
        .collect();
    if !near_zero.is_empty() {
        return Err(Error::DivisionByNearZero { indices: near_zero });
    }
    let stat = actual.iter().zip(expected).map(|(y, e)| (y - e).powi(2) / e).sum();
    Ok((stat, actual.len() - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmapeVariant {
    /// `|Y - E| / (|Y| + |E|)`, bounded by 1.
    #[default]
    Literal,
    /// The common `|Y - E| / ((|Y| + |E|) / 2)` form, bounded by 2.
    Halved,
}

/// Symmetric MAPE as a fraction. Pairs with `|Y| + |E| = 0` contribute 0.
pub fn smape(actual: &[f64], expected: &[f64]) -> Result<f64> {
    smape_with(actual, expected, SmapeVariant::Literal)
}

pub fn smape_with(actual: &[f64], expected: &[f64], variant: SmapeVariant) -> Result<f64> {
    check(actual, expected)?;
    let sum: f64 = actual
        .iter()
        .zip(expected)
        .map(|(y, e)| {
            let denom = y.abs() + e.abs();
            if denom == 0.0 {
                0.0
            } else {
                (y - e).abs() / denom
            }
        })
        .sum();
    let base = sum / actual.len() as f64;
    Ok(match variant {
        SmapeVariant::Literal => base,
        SmapeVariant::Halved => 2.0 * base,
    })
}

pub fn mae(actual: &[f64], expected: &[f64]) -> Result<f64> {
    check(actual, expected)?;
    Ok(actual.iter().zip(expected).map(|(y, e)| (y - e).abs()).sum::<f64>() / actual.len() as f64)
}

pub fn rmse(actual: &[f64], expected: &[f64]) -> Result<f64> {
    check(actual, expected)?;
    let ms = actual.iter().zip(expected).map(|(y, e)| (y - e).powi(2)).sum::<f64>() / actual.len() as f64;
    Ok(ms.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    /// `None` when some expected value is too close to zero to divide by.
    pub chi2: Option<f64>,
    pub chi2_dof: usize,
    pub smape: f64,
    pub mae: f64,
    pub rmse: f64,
    pub n: usize,
}

impl ScoreCard {
    pub fn score(actual: &[f64], expected: &[f64]) -> Result<Self> {
        check(actual, expected)?;
        let chi2 = match chi_squared(actual, expected) {
            Ok((stat, _)) => Some(stat),
            Err(Error::DivisionByNearZero { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self {
            chi2,
            chi2_dof: actual.len() - 1,
            smape: smape(actual, expected)?,
            mae: mae(actual, expected)?,
            rmse: rmse(actual, expected)?,
            n: actual.len(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scorecard serializes")
    }

    /// Plain-text table with one column per labelled scorecard.
    pub fn table(title: &str, columns: &[(&str, &ScoreCard)]) -> String {
        let mut rows: Vec<(String, Vec<String>)> = vec![
            ("Pearson chi squared".into(), Vec::new()),
            ("sMAPE".into(), Vec::new()),
            ("MAE".into(), Vec::new()),
            ("RMSE".into(), Vec::new()),
        ];
        for (_, card) in columns {
            let chi = match card.chi2 {
                Some(c) => format!("{c:.0} (dof: {})", card.chi2_dof),
                None => format!("n/a (dof: {})", card.chi2_dof),
            };
            rows[0].1.push(chi);
            rows[1].1.push(format!("{:.0}%", card.smape * 100.0));
            rows[2].1.push(format!("{:.2}", card.mae));
            rows[3].1.push(format!("{:.2}", card.rmse));
        }
        let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let col_w: Vec<usize> = (0..columns.len())
            .map(|j| rows.iter().map(|r| r.1[j].len()).chain([columns[j].0.len()]).max().unwrap_or(0))
            .collect();

        let mut out = format!("{title}\n");
        out.push_str(&format!("{:label_w$}", ""));
        for (j, (name, _)) in columns.iter().enumerate() {
            out.push_str(&format!("  {:>w$}", name, w = col_w[j]));
        }
        out.push('\n');
        for (label, cells) in &rows {
            out.push_str(&format!("{label:label_w$}"));
            for (j, cell) in cells.iter().enumerate() {
                out.push_str(&format!("  {:>w$}", cell, w = col_w[j]));
            }
            out.push('\n');
        }
        out
    }
}
