//! Random-walk falsification: differencing, autocorrelation, portmanteau
//! and normality tests.

pub mod rng;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::MonthlySeries;

pub use rng::{simulate_random_walk, simulate_white_noise};

/// Lags used by the portmanteau tests unless told otherwise.
pub const DEFAULT_LAGS: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test_name: String,
    pub statistic: f64,
    /// Zero for tests whose reference distribution has no dof parameter.
    pub dof: usize,
    pub p_value: f64,
}

impl TestReport {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Sample autocorrelations `rho[0..=max_lag]` of a regularly sampled series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    pub rho: Vec<f64>,
    pub n: usize,
}

impl AcfResult {
    pub fn max_lag(&self) -> usize {
        self.rho.len() - 1
    }

    /// Half-width of the approximate 95% band for white noise, `2/sqrt(n)`.
    pub fn band(&self) -> f64 {
        2.0 / (self.n as f64).sqrt()
    }
}

/// `y_{t+1} - y_t`, dated at the later month.
pub fn first_differences(series: &MonthlySeries) -> Result<MonthlySeries> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    let diffs = series.values().windows(2).map(|w| w[1] - w[0]).collect();
    MonthlySeries::new(series.date(1), diffs, format!("diff_{}", series.label()))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Biased (1/n) autocorrelation, normalised by the lag-0 sum of squares.
pub fn acf(values: &[f64], max_lag: usize) -> Result<AcfResult> {
    let n = values.len();
    if max_lag >= n {
        return Err(Error::param(format!("max_lag {max_lag} must be below n = {n}")));
    }
    let m = mean(values);
    let centred: Vec<f64> = values.iter().map(|v| v - m).collect();
    let denom: f64 = centred.iter().map(|v| v * v).sum();
    if denom <= n as f64 * (4.0 * f64::EPSILON * m.abs()).powi(2) || !denom.is_finite() {
        return Err(Error::Degenerate("autocorrelation of a constant series".into()));
    }
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.push(1.0);
    for k in 1..=max_lag {
        let num: f64 = centred.iter().zip(&centred[k..]).map(|(a, b)| a * b).sum();
        rho.push((num / denom).clamp(-1.0, 1.0));
    }
    Ok(AcfResult { rho, n })
}

fn check_lags(acf: &AcfResult, h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::param("number of lags must be positive"));
    }
    if h > acf.max_lag() {
        return Err(Error::param(format!("h = {h} exceeds computed lags ({})", acf.max_lag())));
    }
    Ok(())
}

/// Q = n Σ_{k=1..h} rho_k², compared with chi-square(h).
pub fn box_pierce(acf: &AcfResult, h: usize) -> Result<TestReport> {
    check_lags(acf, h)?;
    let q = acf.n as f64 * acf.rho[1..=h].iter().map(|r| r * r).sum::<f64>();
    Ok(TestReport {
        test_name: "box_pierce".into(),
        statistic: q,
        dof: h,
        p_value: special::chi2_sf(q, h),
    })
}

/// Q = n(n+2) Σ_{k=1..h} rho_k² / (n-k), compared with chi-square(h).
pub fn ljung_box(acf: &AcfResult, h: usize) -> Result<TestReport> {
    check_lags(acf, h)?;
    let n = acf.n as f64;
    let sum: f64 = (1..=h).map(|k| acf.rho[k].powi(2) / (n - k as f64)).sum();
    let q = n * (n + 2.0) * sum;
    Ok(TestReport {
        test_name: "ljung_box".into(),
        statistic: q,
        dof: h,
        p_value: special::chi2_sf(q, h),
    })
}

struct Moments {
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

fn central_moments(values: &[f64]) -> Result<Moments> {
    if values.len() < 8 {
        return Err(Error::TooShort {
            needed: 8,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let m = mean(values);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    if m2 <= (4.0 * f64::EPSILON * m.abs()).powi(2) {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok(Moments { mean: m, m2, m3, m4 })
}

/// Kolmogorov-Smirnov distance to the normal with the sample mean and
/// standard deviation, with the asymptotic (Stephens-adjusted) p-value.
pub fn ks_test_normal(values: &[f64]) -> Result<TestReport> {
    let mom = central_moments(values)?;
    let n = values.len();
    let sd = (mom.m2 * n as f64 / (n as f64 - 1.0)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = special::normal_cdf((x - mom.mean) / sd);
        let lo = i as f64 / n as f64;
        let hi = (i + 1) as f64 / n as f64;
        d = d.max(hi - f).max(f - lo);
    }
    let rn = (n as f64).sqrt();
    let lambda = (rn + 0.12 + 0.11 / rn) * d;
    Ok(TestReport {
        test_name: "kolmogorov_smirnov".into(),
        statistic: d,
        dof: 0,
        p_value: special::kolmogorov_sf(lambda),
    })
}

/// JB = (n/6)(S² + (K - 3)²/4) against chi-square(2).
pub fn jarque_bera(values: &[f64]) -> Result<TestReport> {
    let mom = central_moments(values)?;
    let n = values.len() as f64;
    let skew = mom.m3 / mom.m2.powf(1.5);
    let kurt = mom.m4 / (mom.m2 * mom.m2);
    let jb = n / 6.0 * (skew * skew + (kurt - 3.0).powi(2) / 4.0);
    Ok(TestReport {
        test_name: "jarque_bera".into(),
        statistic: jb,
        dof: 2,
        p_value: special::chi2_sf(jb, 2),
    })
}
