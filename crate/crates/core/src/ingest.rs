//! Loading, deflating and shock-excising monthly index series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::{MonthlySeries, SampledSeries, YearMonth};

/// Parse a CSV whose first column holds `YYYY-MM` (or `YYYY:MM`) dates.
///
/// Rows may arrive in any order; the result is sorted and must be gap free.
/// Row numbers in errors are file line numbers, the header being line 1.
pub fn parse_csv(text: &str, value_column: &str) -> Result<MonthlySeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::format(1, e.to_string()))?
        .clone();
    if headers.len() < 2 {
        return Err(Error::format(1, "need a date column and at least one value column"));
    }
    let col = headers
        .iter()
        .position(|h| h == value_column)
        .filter(|&i| i > 0)
        .ok_or_else(|| Error::format(1, format!("no value column named {value_column:?}")))?;

    let mut rows: Vec<(YearMonth, f64, usize)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::format(line, e.to_string()))?;
        let date: YearMonth = record
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|_| Error::format(line, format!("bad date {:?}", record.get(0).unwrap_or(""))))?;
        let cell = record.get(col).unwrap_or_default();
        let value: f64 = cell
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::format(line, format!("bad value {cell:?}")))?;
        rows.push((date, value, line));
    }
    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }

    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        let (prev, next) = (w[0].0, w[1].0);
        if prev == next {
            return Err(Error::format(w[1].2, format!("duplicate month {next}")));
        }
        if next != prev.add_months(1) {
            return Err(Error::Gap {
                expected: prev.add_months(1),
                found: next,
            });
        }
    }
    let start = rows[0].0;
    MonthlySeries::new(start, rows.into_iter().map(|r| r.1).collect(), value_column)
}

/// Header name of the first value column (the second column).
pub fn first_value_column(text: &str) -> Result<String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::format(1, e.to_string()))?;
    headers
        .get(1)
        .map(str::to_string)
        .ok_or_else(|| Error::format(1, "need a date column and at least one value column"))
}

/// Inverse of [`parse_csv`]: a `date,<label>` CSV.
pub fn serialize_csv(series: &MonthlySeries) -> String {
    let label = if series.label().is_empty() {
        "value"
    } else {
        series.label()
    };
    let mut out = format!("date,{label}\n");
    for (date, v) in series.dates().zip(series.values()) {
        out.push_str(&format!("{date},{v}\n"));
    }
    out
}

/// Express `index` in prices of `base`: `index_t * cpi_base / cpi_t`.
pub fn deflate(index: &MonthlySeries, cpi: &MonthlySeries, base: YearMonth) -> Result<MonthlySeries> {
    let base_value = cpi.value_at(base).ok_or_else(|| {
        Error::Coverage(format!("base month {base} outside cpi range {}..{}", cpi.start(), cpi.end()))
    })?;
    if base_value == 0.0 {
        return Err(Error::DegenerateBase(base));
    }
    let first = cpi.index_of(index.start());
    let last = cpi.index_of(index.end());
    let (Some(first), Some(_)) = (first, last) else {
        return Err(Error::Coverage(format!(
            "cpi {}..{} does not cover index {}..{}",
            cpi.start(),
            cpi.end(),
            index.start(),
            index.end()
        )));
    };
    let deflator = &cpi.values()[first..first + index.len()];
    if let Some(i) = deflator.iter().position(|&c| c == 0.0) {
        return Err(Error::DegenerateBase(index.date(i)));
    }
    let values = index
        .values()
        .iter()
        .zip(deflator)
        .map(|(&v, &c)| v * base_value / c)
        .collect();
    Ok(index.with_values(values))
}

/// One exogenous-shock window. `end == None` means open ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShockWindow {
    pub start: YearMonth,
    pub end: Option<YearMonth>,
    pub reason: String,
}

impl ShockWindow {
    pub fn new(start: YearMonth, end: Option<YearMonth>, reason: impl Into<String>) -> Result<Self> {
        if let Some(end) = end {
            if end < start {
                return Err(Error::param(format!("shock window ends ({end}) before it starts ({start})")));
            }
        }
        Ok(Self {
            start,
            end,
            reason: reason.into(),
        })
    }

    pub fn contains(&self, month: YearMonth) -> bool {
        month >= self.start && self.end.is_none_or(|end| month <= end)
    }
}

/// Periods to excise. Windows may overlap; excision removes their union.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShockCalendar {
    windows: Vec<ShockWindow>,
}

impl ShockCalendar {
    pub fn new(windows: Vec<ShockWindow>) -> Result<Self> {
        for w in &windows {
            ShockWindow::new(w.start, w.end, "")?;
        }
        Ok(Self { windows })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn windows(&self) -> &[ShockWindow] {
        &self.windows
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Whether the last window runs through the end of any series.
    pub fn open_ended(&self) -> bool {
        self.windows.last().is_some_and(|w| w.end.is_none())
    }

    pub fn contains(&self, month: YearMonth) -> bool {
        self.windows.iter().any(|w| w.contains(month))
    }

    /// JSON array of `{"start":"YYYY-MM","end":"YYYY-MM"|null,"reason":"..."}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let windows: Vec<ShockWindow> = serde_json::from_str(text).map_err(|e| Error::Format {
            row: e.line(),
            message: e.to_string(),
        })?;
        Self::new(windows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calendar serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Country {
    #[serde(rename = "US")]
    Us,
    Japan,
    Germany,
}

impl Country {
    /// Polynomial trend order used for this market's index.
    pub fn default_trend_order(self) -> usize {
        match self {
            Country::Us | Country::Germany => 5,
            Country::Japan => 6,
        }
    }
}

impl std::str::FromStr for Country {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "us" | "usa" | "united states" => Ok(Country::Us),
            "japan" | "jp" => Ok(Country::Japan),
            "germany" | "de" => Ok(Country::Germany),
            _ => Err(Error::UnknownCountry(s.to_string())),
        }
    }
}

/// Shock calendar used for `country`, ordered by start month.
pub fn builtin_calendar(country: Country) -> ShockCalendar {
    let ym = |y, m| YearMonth::new(y, m).expect("valid literal month");
    let w = |s: YearMonth, e: Option<YearMonth>, r: &str| ShockWindow::new(s, e, r).expect("ordered literal window");
    let terror_end = match country {
        Country::Us => ym(2002, 1),
        Country::Japan | Country::Germany => ym(2001, 11),
    };
    let mut windows = vec![
        w(ym(1962, 10), Some(ym(1962, 10)), "Cuban missile crisis"),
        w(ym(1974, 1), Some(ym(1974, 12)), "oil price shock"),
        w(ym(1979, 11), Some(ym(1980, 6)), "oil price shock"),
        w(ym(1999, 12), Some(ym(2003, 3)), "oil price shock"),
        w(ym(2001, 9), Some(terror_end), "terrorist attacks"),
        w(ym(2003, 2), Some(ym(2003, 4)), "Iraq war"),
    ];
    match country {
        Country::Us => {}
        Country::Germany => windows.push(w(ym(1990, 3), Some(ym(1990, 12)), "reunification")),
        Country::Japan => windows.push(w(ym(2011, 3), Some(ym(2011, 4)), "Fukushima nuclear accident")),
    }
    windows.sort_by_key(|w| w.start);
    windows.push(w(ym(2020, 2), None, "Covid pandemic"));
    ShockCalendar { windows }
}

/// Drop every observation falling in a shock window. Surviving observations
/// keep their month offset from the series start as their time coordinate.
pub fn excise(series: &MonthlySeries, calendar: &ShockCalendar) -> Result<SampledSeries> {
    let (times, values): (Vec<f64>, Vec<f64>) = series
        .dates()
        .zip(series.values())
        .enumerate()
        .filter(|(_, (date, _))| !calendar.contains(*date))
        .map(|(i, (_, &v))| (i as f64, v))
        .unzip();
    if times.is_empty() {
        return Err(Error::EmptySeries);
    }
    SampledSeries::new(series.start(), times, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ym(s: &str) -> YearMonth {
        s.parse().unwrap()
    }

    fn series(start: &str, values: &[f64]) -> MonthlySeries {
        MonthlySeries::new(ym(start), values.to_vec(), "v").unwrap()
    }

    #[test]
    fn parses_two_row_file() {
        let s = parse_csv("date,v\n1960-01,10\n1960-02,11", "v").unwrap();
        assert_eq!(s.start(), ym("1960-01"));
        assert_eq!(s.values(), &[10.0, 11.0]);
    }

    #[test]
    fn sorts_rows_and_accepts_colon_dates() {
        let s = parse_csv("date,a,b\n1960:02,1,20\n1960:01,2,10\n", "b").unwrap();
        assert_eq!(s.values(), &[10.0, 20.0]);
        assert_eq!(s.label(), "b");
    }

    #[test]
    fn first_value_column_is_second_header() {
        assert_eq!(first_value_column("date, close ,volume\n").unwrap(), "close");
        assert!(first_value_column("date\n").is_err());
    }

    #[test]
    fn missing_month_is_a_gap() {
        let err = parse_csv("date,v\n1960-01,10\n1960-03,11", "v").unwrap_err();
        assert!(matches!(err, Error::Gap { expected, found } if expected == ym("1960-02") && found == ym("1960-03")));
    }

    #[test]
    fn bad_cell_reports_row() {
        let err = parse_csv("date,v\n1960-01,10\n1960-02,abc\n", "v").unwrap_err();
        assert!(matches!(err, Error::Format { row: 3, .. }), "{err:?}");
        let err = parse_csv("date,v\n1960-01,10\n19x0-02,1\n", "v").unwrap_err();
        assert!(matches!(err, Error::Format { row: 3, .. }), "{err:?}");
        let err = parse_csv("date,v\n1960-01,10\n1960-01,1\n", "v").unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "{err:?}");
        let err = parse_csv("date,v\n1960-01,10\n", "w").unwrap_err();
        assert!(matches!(err, Error::Format { row: 1, .. }), "{err:?}");
    }

    #[test]
    fn deflation_examples() {
        let out = deflate(&series("2000-01", &[100.0, 110.0]), &series("2000-01", &[100.0, 110.0]), ym("2000-01")).unwrap();
        assert_eq!(out.values(), &[100.0, 100.0]);

        let out = deflate(&series("2000-01", &[100.0]), &series("2000-01", &[100.0]), ym("2000-01")).unwrap();
        assert_eq!(out.values(), &[100.0]);

        let out = deflate(
            &series("2000-01", &[200.0, 210.0, 220.0]),
            &series("2000-01", &[100.0, 105.0, 110.0]),
            ym("2000-01"),
        )
        .unwrap();
        for v in out.values() {
            assert!((v - 200.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deflation_with_base_outside_index_range() {
        let cpi = series("1959-12", &[50.0, 100.0, 200.0]);
        let out = deflate(&series("1960-01", &[10.0, 10.0]), &cpi, ym("1959-12")).unwrap();
        assert_eq!(out.values(), &[5.0, 2.5]);
    }

    #[test]
    fn deflation_errors() {
        let idx = series("2000-01", &[1.0, 2.0, 3.0]);
        let short = series("2000-01", &[1.0, 2.0]);
        assert!(matches!(deflate(&idx, &short, ym("2000-01")), Err(Error::Coverage(_))));
        assert!(matches!(deflate(&idx, &series("2000-01", &[1.0, 1.0, 1.0]), ym("1999-01")), Err(Error::Coverage(_))));
        let zero_base = series("2000-01", &[0.0, 1.0, 1.0]);
        assert!(matches!(deflate(&idx, &zero_base, ym("2000-01")), Err(Error::DegenerateBase(_))));
    }

    #[test]
    fn deflation_idempotent_under_constant_cpi() {
        let idx = series("2000-01", &[3.0, 1.5, 7.25, 9.0]);
        let cpi = series("1999-06", &[4.2; 20]);
        let once = deflate(&idx, &cpi, ym("2000-03")).unwrap();
        let twice = deflate(&once, &cpi, ym("2000-03")).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.values(), idx.values());
    }

    #[test]
    fn excise_with_empty_calendar_is_noop() {
        let s = series("2000-01", &[5.0, 6.0, 7.0]);
        let out = excise(&s, &ShockCalendar::empty()).unwrap();
        assert_eq!(out.times(), &[0.0, 1.0, 2.0]);
        assert_eq!(out.values(), s.values());
    }

    #[test]
    fn excise_everything_fails() {
        let s = series("2000-01", &[5.0, 6.0, 7.0]);
        let cal = ShockCalendar::new(vec![ShockWindow::new(ym("1999-01"), None, "all").unwrap()]).unwrap();
        assert!(matches!(excise(&s, &cal), Err(Error::EmptySeries)));
    }

    #[test]
    fn excise_window_keeps_original_times() {
        // Months 4..=6 counted from 1 are offsets 3..=5; hand enumeration below.
        let s = series("2000-01", &(0..12).map(f64::from).collect::<Vec<_>>());
        let cal = ShockCalendar::new(vec![ShockWindow::new(ym("2000-04"), Some(ym("2000-06")), "x").unwrap()]).unwrap();
        let out = excise(&s, &cal).unwrap();
        assert_eq!(out.times(), &[0.0, 1.0, 2.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0]);
        assert_eq!(out.len() + 3, s.len());
    }

    #[test]
    fn overlapping_windows_use_union() {
        let s = series("2000-01", &[1.0; 10]);
        let cal = ShockCalendar::new(vec![
            ShockWindow::new(ym("2000-02"), Some(ym("2000-05")), "a").unwrap(),
            ShockWindow::new(ym("2000-04"), Some(ym("2000-06")), "b").unwrap(),
        ])
        .unwrap();
        assert_eq!(excise(&s, &cal).unwrap().times(), &[0.0, 6.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn builtin_calendars() {
        let has = |c: &ShockCalendar, s: &str, e: &str| {
            c.windows().iter().any(|w| w.start == ym(s) && w.end == Some(ym(e)))
        };
        let us = builtin_calendar(Country::Us);
        assert!(has(&us, "1962-10", "1962-10"));
        assert!(has(&us, "1974-01", "1974-12"));
        assert!(has(&us, "2001-09", "2002-01"));
        assert!(us.open_ended());
        assert!(us.contains(ym("2022-07")));

        let de = builtin_calendar(Country::Germany);
        assert!(has(&de, "1990-03", "1990-12"));
        assert!(has(&de, "2001-09", "2001-11"));
        assert!(!has(&de, "2011-03", "2011-04"));

        let jp = builtin_calendar(Country::Japan);
        assert!(has(&jp, "2011-03", "2011-04"));
        assert!(!has(&jp, "1990-03", "1990-12"));

        assert!(matches!("France".parse::<Country>(), Err(Error::UnknownCountry(_))));
        assert_eq!(Country::Japan.default_trend_order(), 6);
    }

    #[test]
    fn calendar_json_round_trip() {
        let text = r#"[{"start":"1962-10","end":"1962-10","reason":"crisis"},
                       {"start":"2020:02","end":null,"reason":"covid"}]"#;
        let cal = ShockCalendar::from_json(text).unwrap();
        assert_eq!(cal.windows().len(), 2);
        assert!(cal.open_ended());
        assert_eq!(ShockCalendar::from_json(&cal.to_json()).unwrap(), cal);

        let backwards = r#"[{"start":"1963-10","end":"1962-10","reason":"x"}]"#;
        assert!(ShockCalendar::from_json(backwards).is_err());
    }
}
