//! Calendar months and the two series shapes the pipeline moves between:
//! gap-free monthly series and (possibly irregular) sampled series.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A Gregorian calendar month. Ordering follows the calendar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::param(format!("month {month} outside 1..=12")));
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    /// Months elapsed since 0000-01.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        Self {
            year: ordinal.div_euclid(12) as i32,
            month: ordinal.rem_euclid(12) as u32 + 1,
        }
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `earlier` to `self`.
    pub fn months_since(self, earlier: YearMonth) -> i64 {
        self.ordinal() - earlier.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    /// Accepts `YYYY-MM` and `YYYY:MM`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::format(0, format!("cannot parse {s:?} as YYYY-MM or YYYY:MM"));
        let (y, m) = s.split_once(['-', ':']).ok_or_else(bad)?;
        if y.is_empty() || m.is_empty() || m.len() > 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        YearMonth::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Regularly sampled monthly observations starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlySeries {
    start: YearMonth,
    values: Vec<f64>,
    label: String,
}

impl MonthlySeries {
    pub fn new(start: YearMonth, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::format(i + 1, "non-finite value"));
        }
        Ok(Self {
            start,
            values,
            label: label.into(),
        })
    }

    pub fn start(&self) -> YearMonth {
        self.start
    }

    pub fn end(&self) -> YearMonth {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date(&self, index: usize) -> YearMonth {
        self.start.add_months(index as i64)
    }

    pub fn dates(&self) -> impl Iterator<Item = YearMonth> + '_ {
        (0..self.values.len()).map(|i| self.date(i))
    }

    pub fn index_of(&self, month: YearMonth) -> Option<usize> {
        let off = month.months_since(self.start);
        (off >= 0 && (off as usize) < self.values.len()).then_some(off as usize)
    }

    pub fn value_at(&self, month: YearMonth) -> Option<f64> {
        self.index_of(month).map(|i| self.values[i])
    }

    /// Observations up to and including `last`.
    pub fn truncate_through(&self, last: YearMonth) -> Result<Self> {
        let idx = self
            .index_of(last)
            .ok_or_else(|| Error::param(format!("{last} outside {}..{}", self.start, self.end())))?;
        Self::new(self.start, self.values[..=idx].to_vec(), self.label.clone())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        Self {
            start: self.start,
            values,
            label: self.label.clone(),
        }
    }
}

/// Observations at arbitrary, strictly increasing times measured in months
/// since `origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSeries {
    origin: YearMonth,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledSeries {
    pub fn new(origin: YearMonth, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::param("non-finite time or value"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("times must be strictly increasing"));
        }
        Ok(Self {
            origin,
            times,
            values,
        })
    }

    /// Regular sampling from a monthly series; time 0 is the first month.
    pub fn from_monthly(series: &MonthlySeries) -> Self {
        Self {
            origin: series.start(),
            times: (0..series.len()).map(|i| i as f64).collect(),
            values: series.values().to_vec(),
        }
    }

    pub fn origin(&self) -> YearMonth {
        self.origin
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// True when consecutive times are exactly one month apart.
    pub fn is_regular(&self) -> bool {
        self.times.windows(2).all(|w| w[1] - w[0] == 1.0)
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.origin, self.times.clone(), values)
    }

    pub fn month_at(&self, time: f64) -> YearMonth {
        self.origin.add_months(time.round() as i64)
    }
}
