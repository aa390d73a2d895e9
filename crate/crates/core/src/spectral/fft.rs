//! Discrete Fourier transform with unitary scaling:
//! `d_j = n^{-1/2} Σ_t x_t exp(-2πi j t / n)`.
//!
//! Power-of-two lengths go through an iterative radix-2 FFT; every other
//! length is summed directly so that the grid stays exactly `j / n`.

use std::f64::consts::TAU;

use num_complex::Complex64;

pub fn dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = if n.is_power_of_two() {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_in_place(&mut buf);
        buf
    } else {
        direct(x)
    };
    let norm = 1.0 / (n as f64).sqrt();
    for v in &mut out {
        *v *= norm;
    }
    out
}

/// Unnormalised O(n²) transform. Twiddle indices are reduced mod n so each
/// exponent is one of n exactly tabulated roots of unity.
pub(crate) fn direct(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let roots = roots_of_unity(n, n);
    (0..n)
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &v in x {
                acc += roots[idx] * v;
                idx += j;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// `exp(-2πi k / n)` for `k < count`.
fn roots_of_unity(n: usize, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let (s, c) = (-TAU * k as f64 / n as f64).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// In-place unnormalised radix-2 decimation-in-time FFT.
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    assert!(n.is_power_of_two());
    if n == 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let roots = roots_of_unity(n, n / 2);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for chunk in buf.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = roots[k * step] * *b;
                *b = *a - t;
                *a += t;
            }
        }
        len *= 2;
    }
}
