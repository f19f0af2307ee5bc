//! The resolvent `(1 - v² ∂ₓ²)^{-1}` on the torus, its Green function `φ_v`,
//! and the mean-zero Poisson kernel `ψ`.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::{DensityProfile, PhaseField};
use crate::quadrature::Composite;

/// Fourier multiplier of the resolvent at mode `k` and velocity `v`.
pub fn resolvent_symbol(k: i64, v: f64) -> f64 {
    let s = 2.0 * PI * k as f64 * v;
    1.0 / (1.0 + s * s)
}

/// Apply the resolvent entrywise in `(k, v)`.
pub fn apply_resolvent(src: &PhaseField) -> PhaseField {
    let mut out = src.clone();
    let nodes = src.grid().nodes().to_vec();
    let o = src.order() as i64;
    for k in -o..=o {
        if k == 0 {
            continue;
        }
        for (c, &v) in out.mode_mut(k).iter_mut().zip(&nodes) {
            *c *= resolvent_symbol(k, v);
        }
    }
    out
}

/// Green function of `1 - v² ∂ₓ²` on the unit torus for a fixed `v ≠ 0`.
#[derive(Debug, Clone, Copy)]
pub struct GreenKernel {
    speed: f64,
}

impl GreenKernel {
    pub fn new(v: f64) -> Result<Self> {
        if v == 0.0 || !v.is_finite() {
            return Err(Error::Singular(alloc::format!(
                "Green function needs a finite nonzero velocity, got {v}"
            )));
        }
        Ok(Self { speed: v.abs() })
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn symbol(&self, k: i64) -> f64 {
        resolvent_symbol(k, self.speed)
    }

    /// Whole-line kernel `e^{-|x|/|v|} / (2|v|)`.
    pub fn line(&self, x: f64) -> f64 {
        (-x.abs() / self.speed).exp() / (2.0 * self.speed)
    }

    /// Periodized kernel, summing all images in closed form.
    pub fn periodized(&self, x: f64) -> f64 {
        let a = self.speed;
        let y = x - x.floor();
        let num = (-y / a).exp() + (-(1.0 - y) / a).exp();
        num / (-(-1.0 / a).exp_m1() * 2.0 * a)
    }

    /// Direct sum of the images `|m| <= images`.
    pub fn image_sum(&self, x: f64, images: usize) -> f64 {
        let m = images as i64;
        (-m..=m).map(|i| self.line(x + i as f64)).sum()
    }

    /// Inverse Fourier series of the symbol, with the `1/k²` part summed exactly
    /// through the Bernoulli identity and the `O(k^{-4})` remainder truncated at `modes`.
    pub fn fourier_sum(&self, x: f64, modes: usize) -> f64 {
        let c = (2.0 * PI * self.speed).powi(2);
        let y = x - x.floor();
        let bernoulli = PI * PI * (y * y - y + 1.0 / 6.0);
        let remainder: f64 = (1..=modes)
            .map(|k| {
                let k2 = (k * k) as f64;
                (2.0 * PI * k as f64 * y).cos() / (c * k2 * (1.0 + c * k2))
            })
            .sum();
        1.0 + 2.0 * (bernoulli / c - remainder)
    }

    /// Number of images that brings the truncated image sum to double precision.
    pub fn images_for_precision(&self) -> usize {
        (26.0 * self.speed).ceil() as usize + 30
    }

    /// `L^p(ℝ)` norm of the line kernel (closed form); `p = ∞` allowed.
    pub fn line_lp_norm(&self, p: f64) -> f64 {
        let peak = 1.0 / (2.0 * self.speed);
        if p.is_infinite() {
            peak
        } else {
            (1.0 / p).powf(1.0 / p) * peak.powf((p - 1.0) / p)
        }
    }

    /// `L^p(𝕋)` norm of the periodized kernel, by graded Gauss–Legendre quadrature.
    pub fn torus_lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.periodized(0.0);
        }
        let mut breaks = alloc::vec![0.0];
        let mut b = self.speed.min(0.5) / 64.0;
        while b < 0.5 {
            breaks.push(b);
            b *= 2.0;
        }
        breaks.push(0.5);
        let rule = Composite::new(16);
        let half = rule.integrate_breaks(|x| self.periodized(x).powf(p), &breaks, 2);
        (2.0 * half).powf(1.0 / p)
    }
}

/// Closed-form `‖φ_v‖_{L^p(ℝ)}`.
pub fn green_lp_norm(v: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(GreenKernel::new(v)?.line_lp_norm(p))
}

/// Quadrature `‖φ_v‖_{L^p(𝕋)}` of the periodized kernel.
pub fn green_torus_lp_norm(v: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(GreenKernel::new(v)?.torus_lp_norm(p))
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::param(
            "p",
            alloc::format!("exponent must be at least 1, got {p}"),
        ));
    }
    Ok(())
}

/// Pointwise lower bound `e^{-1/|v|} / (2|v|)` of the periodized kernel.
pub fn green_lower_bound(v: f64) -> Result<f64> {
    let g = GreenKernel::new(v)?;
    let a = g.speed();
    Ok((-1.0 / a).exp() / (2.0 * a))
}

/// Mean-zero solution kernel `ψ(x) = Σ_{k≠0} e^{2πikx} / (4π²k²)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoissonKernel;

impl PoissonKernel {
    /// Closed form `x²/2 - |x|/2 + 1/12` after reduction to `[-1/2, 1/2]`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let y = (x - x.round()).abs();
        0.5 * y * y - 0.5 * y + 1.0 / 12.0
    }

    /// Partial Fourier sum over `1 <= |k| <= modes`.
    pub fn fourier_partial_sum(&self, x: f64, modes: usize) -> f64 {
        (1..=modes)
            .map(|k| {
                let k = k as f64;
                2.0 * (2.0 * PI * k * x).cos() / (4.0 * PI * PI * k * k)
            })
            .sum()
    }

    /// Partial sum at `x = 0` plus the Euler–Maclaurin estimate of the tail.
    pub fn value_at_zero_extrapolated(&self, modes: usize) -> f64 {
        let n = modes as f64;
        let tail = 1.0 / n - 0.5 / (n * n) + 1.0 / (6.0 * n * n * n);
        self.fourier_partial_sum(0.0, modes) + 2.0 * tail / (4.0 * PI * PI)
    }
}

/// `ψ * (src - mean)`: mode `k ≠ 0` scaled by `1/(4π²k²)`, mode 0 dropped.
pub fn psi_convolve(src: &DensityProfile) -> DensityProfile {
    let o = src.order() as i64;
    let mut out = DensityProfile::zeros(src.order());
    for k in 1..=o {
        out.set_mode(k, src.mode(k) / (4.0 * PI * PI * (k * k) as f64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_values() {
        assert_eq!(resolvent_symbol(0, 3.0), 1.0);
        assert!((resolvent_symbol(1, 1.0 / (2.0 * PI)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_images_and_fourier() {
        for &v in &[0.1, 0.37, 1.0, 2.5, 10.0] {
            let g = GreenKernel::new(v).unwrap();
            let m = g.images_for_precision();
            for i in 0..21 {
                let x = -0.5 + i as f64 / 20.0;
                let p = g.periodized(x);
                assert!((p - g.image_sum(x, m)).abs() < 1e-10 * p.max(1.0), "v={v} x={x}");
                assert!((p - g.fourier_sum(x, 4000)).abs() < 1e-10, "v={v} x={x}");
            }
        }
    }

    #[test]
    fn norms() {
        assert_eq!(green_lp_norm(2.0, f64::INFINITY).unwrap(), 0.25);
        assert!((green_lp_norm(0.7, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((green_lp_norm(1.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(green_lp_norm(0.0, 2.0).is_err());
        // The periodized kernel integrates to one on the torus.
        assert!((green_torus_lp_norm(3.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((green_torus_lp_norm(0.05, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_values() {
        assert!((green_lower_bound(1.0).unwrap() - 0.183_939_720_585_721_2).abs() < 1e-15);
        assert!((green_lower_bound(2.0).unwrap() - 0.151_632_664_928_158_4).abs() < 1e-15);
        assert!(green_lower_bound(0.0).is_err());
    }

    #[test]
    fn poisson_kernel() {
        let psi = PoissonKernel;
        assert!((psi.evaluate(0.0) - 1.0 / 12.0).abs() < 1e-16);
        assert!((psi.value_at_zero_extrapolated(1000) - 1.0 / 12.0).abs() < 1e-10);
        let x = 0.3;
        assert!((psi.evaluate(x) - psi.fourier_partial_sum(x, 200_000)).abs() < 1e-7);
    }

    #[test]
    fn psi_convolve_single_mode() {
        let src = DensityProfile::from_trig(3, 1.0, &[(1, 1.0, 0.0)]).unwrap();
        let out = psi_convolve(&src);
        assert_eq!(out.mean(), 0.0);
        assert!((out.mode(1).re - 0.5 / (4.0 * PI * PI)).abs() < 1e-16);
    }
}
