//! Gauss–Legendre rules and a few composite integrators used where the
//! velocity grid is not appropriate (closed-form cross-checks, singular weights).

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre quadrature with fixed panels.
#[derive(Debug, Clone)]
pub struct Composite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Composite {
    pub fn new(points_per_panel: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points_per_panel);
        Self { nodes, weights }
    }

    /// `∫_a^b f` over `panels` equal panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let s: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| w * f(mid + 0.5 * h * x))
                .sum();
            total += 0.5 * h * s;
        }
        total
    }

    /// Nodes and weights of the rule over consecutive breakpoints, `panels` panels per interval.
    pub fn rule_on_breaks(&self, breaks: &[f64], panels: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let h = (w[1] - w[0]) / panels as f64;
            for p in 0..panels {
                let mid = w[0] + (p as f64 + 0.5) * h;
                for (x, wt) in self.nodes.iter().zip(&self.weights) {
                    nodes.push(mid + 0.5 * h * x);
                    weights.push(0.5 * h * wt);
                }
            }
        }
        (nodes, weights)
    }

    /// `∫` over consecutive breakpoints, `panels` panels per interval.
    pub fn integrate_breaks<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64], panels: usize) -> f64 {
        breaks
            .windows(2)
            .map(|w| self.integrate(&mut f, w[0], w[1], panels))
            .sum()
    }
}

/// `∫_0^∞ w^{-r} g(w) dw` for `0 <= r < 1` and `g` decaying on the scale `scale`.
///
/// The singular piece `[0, scale]` is mapped by `w = scale * u^{1/(1-r)}`,
/// which absorbs the weight exactly; the tail is integrated on `[scale, 40 scale]`.
pub fn power_weighted_half_line<F: Fn(f64) -> f64>(r: f64, g: F, scale: f64) -> f64 {
    let rule = Composite::new(20);
    let p = 1.0 / (1.0 - r);
    let head = rule.integrate(|u| g(scale * u.powf(p)), 0.0, 1.0, 32) * scale.powf(1.0 - r) / (1.0 - r);
    let tail = rule.integrate(|w| w.powf(-r) * g(w), scale, 40.0 * scale, 128);
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..14 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let rule = Composite::new(16);
        let q = rule.integrate(|x| (-x * x / 2.0).exp(), -12.0, 12.0, 24);
        assert!((q - (2.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn singular_weight_matches_gamma() {
        // ∫_0^∞ w^{-r} e^{-w²/2} dw = 2^{(1-r)/2 - 1} Γ((1-r)/2)
        for &r in &[0.0, 0.3, 0.75, 0.95] {
            let q = power_weighted_half_line(r, |w| (-w * w / 2.0).exp(), 1.0);
            let exact = 2f64.powf((1.0 - r) / 2.0 - 1.0) * libm::tgamma((1.0 - r) / 2.0);
            assert!((q - exact).abs() < 1e-10, "r = {r}: {q} vs {exact}");
        }
    }
}
