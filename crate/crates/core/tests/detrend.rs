use cyclefit::detrend::{detrend, fit_polynomial};
use cyclefit::SampledSeries;
use cyclefit::YearMonth;
use num::{BigInt, BigRational, Zero};
use proptest::prelude::*;

fn origin() -> YearMonth {
    YearMonth::new(1990, 1).unwrap()
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Solve `(XᵀX) c = Xᵀy` exactly by Gauss-Jordan elimination.
fn normal_equations(x: &[Vec<BigRational>], y: &[BigRational]) -> Vec<BigRational> {
    let p = x[0].len();
    let mut m: Vec<Vec<BigRational>> = (0..p)
        .map(|i| {
            let mut row: Vec<BigRational> = (0..p)
                .map(|j| x.iter().fold(BigRational::zero(), |acc, r| acc + &r[i] * &r[j]))
                .collect();
            row.push(x.iter().zip(y).fold(BigRational::zero(), |acc, (r, v)| acc + &r[i] * v));
            row
        })
        .collect();
    for col in 0..p {
        let pivot = (col..p).find(|&r| !m[r][col].is_zero()).expect("nonsingular");
        m.swap(col, pivot);
        let lead = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &lead;
        }
        for r in 0..p {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot_row) {
                    *v = &*v - &factor * pv;
                }
            }
        }
    }
    m.into_iter().map(|row| row[p].clone()).collect()
}

fn to_f64(r: &BigRational) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap();
    let den: f64 = r.denom().to_string().parse().unwrap();
    num / den
}

#[test]
fn quadratic_fit_matches_exact_normal_equations() {
    // t = 0..19 maps to s = (2t - 19) / 19.
    let ts: Vec<i64> = (0..20).collect();
    let ys: Vec<i64> = ts.iter().map(|t| t * t + t % 3 - 2 * (t % 5)).collect();
    let x: Vec<Vec<BigRational>> = ts
        .iter()
        .map(|&t| {
            let s = BigRational::new(BigInt::from(2 * t - 19), BigInt::from(19));
            vec![rat(1), s.clone(), &s * &s]
        })
        .collect();
    let y: Vec<BigRational> = ys.iter().map(|&v| rat(v)).collect();
    let exact = normal_equations(&x, &y);

    let series = SampledSeries::new(
        origin(),
        ts.iter().map(|&t| t as f64).collect(),
        ys.iter().map(|&v| v as f64).collect(),
    )
    .unwrap();
    let fit = fit_polynomial(&series, 2).unwrap();
    for (c, e) in fit.coeffs().iter().zip(&exact) {
        let e = to_f64(e);
        assert!((c - e).abs() <= 1e-10 * e.abs().max(1.0), "{c} vs {e}");
    }
}

#[test]
fn exact_quadratic_is_reproduced() {
    let times: Vec<f64> = (0..20).map(f64::from).collect();
    let values: Vec<f64> = times.iter().map(|t| t * t).collect();
    let series = SampledSeries::new(origin(), times.clone(), values.clone()).unwrap();
    let fit = fit_polynomial(&series, 2).unwrap();
    for (t, v) in times.iter().zip(&values) {
        assert!((fit.eval(*t) - v).abs() < 1e-9);
    }
}

fn series_strategy() -> impl Strategy<Value = SampledSeries> {
    (20usize..200, any::<u64>()).prop_map(|(n, seed)| {
        let noise = cyclefit::stats::rng::standard_normals(seed, n);
        // Irregular but increasing times: skip every month whose draw is small.
        let mut times = Vec::with_capacity(n);
        let mut t = 0.0;
        for i in 0..n {
            t += 1.0 + (cyclefit::stats::rng::draw_unit(seed ^ 0xabc, i as u64) < 0.2) as u8 as f64;
            times.push(t);
        }
        let values = times
            .iter()
            .zip(&noise)
            .map(|(t, z)| 100.0 + 0.3 * t - 0.001 * t * t + 5.0 * z)
            .collect();
        SampledSeries::new(origin(), times, values).unwrap()
    })
}

fn rss(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residuals_are_orthogonal_to_basis(series in series_strategy(), order in 0usize..=8) {
        let trend = fit_polynomial(&series, order).unwrap();
        let resid = detrend(&series, &trend).unwrap();
        let n = series.len() as f64;
        let scale = rss(resid.values()).sqrt().max(1.0);
        for k in 0..=order {
            let dot: f64 = series
                .times()
                .iter()
                .zip(resid.values())
                .map(|(&t, r)| r * trend.scale(t).powi(k as i32))
                .sum();
            prop_assert!((dot / n).abs() < 1e-8 * scale, "k = {}: {}", k, dot / n);
        }
        let mean = resid.values().iter().sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-8 * scale);
    }

    #[test]
    fn rss_never_increases_with_order(series in series_strategy()) {
        let mut last = f64::INFINITY;
        for order in 0..=10 {
            let trend = fit_polynomial(&series, order).unwrap();
            let r = rss(detrend(&series, &trend).unwrap().values());
            prop_assert!(r <= last * (1.0 + 1e-10) + 1e-9, "order {}: {} > {}", order, r, last);
            last = r;
        }
    }
}
