//! Dense least squares by Householder QR.

/// Least-squares failure: the column at `column` is (numerically) dependent
/// on the ones before it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Singular {
    pub column: usize,
    pub ratio: f64,
}

/// Relative size of an R diagonal entry below which a column counts as
/// dependent on the preceding ones.
pub(crate) const RANK_TOL: f64 = 1e-10;

/// Minimise `||A x - y||` for a row-major `rows x cols` matrix.
pub(crate) fn least_squares(a: &[f64], rows: usize, cols: usize, y: &[f64]) -> Result<Vec<f64>, Singular> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(y.len(), rows);
    assert!(rows >= cols);

    // Column-major working copy keeps the Householder sweeps contiguous.
    let mut q: Vec<Vec<f64>> = (0..cols).map(|j| (0..rows).map(|i| a[i * cols + j]).collect()).collect();
    let mut rhs = y.to_vec();
    let col_scale = q.iter().map(|c| norm(c)).fold(0.0, f64::max);
    if col_scale == 0.0 {
        return Err(Singular { column: 0, ratio: 0.0 });
    }
    let mut diag = vec![0.0; cols];

    for k in 0..cols {
        let alpha = norm(&q[k][k..]);
        if alpha <= RANK_TOL * col_scale {
            return Err(Singular {
                column: k,
                ratio: alpha / col_scale,
            });
        }
        let alpha = if q[k][k] > 0.0 { -alpha } else { alpha };
        // v = x - alpha e1, stored in place of the column
        q[k][k] -= alpha;
        let vnorm2: f64 = q[k][k..].iter().map(|v| v * v).sum();
        diag[k] = alpha;

        let (head, tail) = q.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            reflect(v, vnorm2, &mut col[k..]);
        }
        reflect(v, vnorm2, &mut rhs[k..]);
    }

    // Back substitution on R x = Q^T y.
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let mut s = rhs[k];
        for (j, xj) in x.iter().enumerate().skip(k + 1) {
            s -= q[j][k] * xj;
        }
        x[k] = s / diag[k];
    }
    Ok(x)
}

fn reflect(v: &[f64], vnorm2: f64, target: &mut [f64]) {
    let dot: f64 = v.iter().zip(target.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (t, vi) in target.iter_mut().zip(v) {
        *t -= f * vi;
    }
}

fn norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}
