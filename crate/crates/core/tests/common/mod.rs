//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use bgk_core::ModelParams;

pub fn params(alpha: f64, t1: f64, t2: f64) -> ModelParams {
    ModelParams::new(alpha, t1, t2).expect("valid parameters")
}

pub fn gaussian(t: f64, v: f64) -> f64 {
    (-v * v / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫_ℝ f` for a Gaussian-tailed integrand of scale `sqrt(t_max)`, split into panels.
pub fn integrate_line<F: Fn(f64) -> f64>(f: &F, t_max: f64) -> f64 {
    let l = 12.0 * t_max.sqrt();
    let panels = 64;
    let h = 2.0 * l / panels as f64;
    (0..panels)
        .map(|i| {
            let a = -l + i as f64 * h;
            simpson(f, a, a + h, 1e-15)
        })
        .sum()
}

/// `∫ v^{2n} M_T dv = (2n-1)!! T^n`.
pub fn gaussian_even_moment(t: f64, n: u32) -> f64 {
    let double_factorial: f64 = (1..=n).map(|i| (2 * i - 1) as f64).product();
    double_factorial * t.powi(n as i32)
}
