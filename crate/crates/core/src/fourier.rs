//! Discrete Fourier transforms on the unit torus.
//!
//! Modes are stored as `c[k + K]` for `k in -K..=K`. Samples live on the
//! uniform grid `x_j = j / n`. Power-of-two lengths use an iterative radix-2
//! FFT; any other length falls back to the direct sum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// In-place DFT: `X_k = sum_j x_j exp(∓2πi jk/n)`, with the `+` sign when `inverse`.
/// No normalization is applied in either direction.
pub fn dft_in_place(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_radix2(data, inverse);
    } else {
        let out = direct_dft(data, inverse);
        data.copy_from_slice(&out);
    }
}

fn direct_dft(data: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = data.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            data.iter()
                .enumerate()
                .map(|(j, &x)| {
                    let theta = sign * 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                    x * Complex64::new(theta.cos(), theta.sin())
                })
                .sum()
        })
        .collect()
}

fn fft_radix2(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // Twiddles from exact angles rather than repeated multiplication.
        let twiddles: Vec<Complex64> = (0..half)
            .map(|j| {
                let theta = sign * 2.0 * PI * j as f64 / len as f64;
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        for start in (0..n).step_by(len) {
            for j in 0..half {
                let u = data[start + j];
                let t = data[start + j + half] * twiddles[j];
                data[start + j] = u + t;
                data[start + j + half] = u - t;
            }
        }
        len <<= 1;
    }
}

/// Number of collocation points used for nonlinear evaluations at truncation `order`:
/// at least `4K`, rounded up to a power of two.
pub fn collocation_points(order: usize) -> usize {
    (4 * order).max(8).next_power_of_two()
}

/// Evaluate the trigonometric polynomial with the given modes at `x_j = j/n`.
pub fn synthesize(modes: &[Complex64], n: usize) -> Vec<Complex64> {
    let order = modes.len() / 2;
    assert!(n > 2 * order, "need more than 2K samples to hold K modes");
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); n];
    for (idx, &c) in modes.iter().enumerate() {
        let k = idx as i64 - order as i64;
        buf[k.rem_euclid(n as i64) as usize] = c;
    }
    dft_in_place(&mut buf, true);
    buf
}

/// Real parts of [`synthesize`], for profiles known to be real.
pub fn synthesize_real(modes: &[Complex64], n: usize) -> Vec<f64> {
    synthesize(modes, n).into_iter().map(|c| c.re).collect()
}

/// Fourier coefficients `|k| <= order` of the samples `s_j = s(j/n)`.
pub fn analyze(samples: &[Complex64], order: usize) -> Vec<Complex64> {
    let n = samples.len();
    assert!(n > 2 * order, "need more than 2K samples to resolve K modes");
    let mut buf = samples.to_vec();
    dft_in_place(&mut buf, false);
    let scale = 1.0 / n as f64;
    (-(order as i64)..=order as i64)
        .map(|k| buf[k.rem_euclid(n as i64) as usize] * scale)
        .collect()
}

/// [`analyze`] for real samples.
pub fn analyze_real(samples: &[f64], order: usize) -> Vec<Complex64> {
    let buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    analyze(&buf, order)
}
