//! Per-Fourier-mode matrices: streaming `S`, collision `L`, generator
//! `C_k = -(L - iκS)` and the Lyapunov matrix `P_k`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::SpectralBasis;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, to_complex, CMatrix};
use crate::model::ModelParams;

/// How the Fourier index enters the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FrequencyConvention {
    /// `κ = 2πk`, matching the `e^{2πikx}` basis used by the solvers.
    #[default]
    TwoPi,
    /// `κ = k`, as for `e^{ikx}` on a torus of length `2π`.
    Unit,
}

impl FrequencyConvention {
    pub fn kappa(self, k: i64) -> f64 {
        match self {
            FrequencyConvention::TwoPi => 2.0 * PI * k as f64,
            FrequencyConvention::Unit => k as f64,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrequencyConvention::TwoPi => "two-pi",
            FrequencyConvention::Unit => "unit",
        }
    }
}

/// Streaming matrix `√T∞ · tridiag(a_m)` truncated to `m × m`.
pub fn streaming_matrix(basis: &SpectralBasis, m: usize) -> DMatrix<f64> {
    let st = basis.params().t_inf().sqrt();
    let mut s = DMatrix::zeros(m, m);
    for i in 1..m {
        let a = st * basis.a(i);
        s[(i - 1, i)] = a;
        s[(i, i - 1)] = a;
    }
    s
}

/// Collision matrix `-I + e_0 e_0ᵀ + b e_2ᵀ` truncated to `m × m`.
pub fn collision_matrix(basis: &SpectralBasis, m: usize) -> DMatrix<f64> {
    let b = basis.gain_coefficients();
    let mut l = -DMatrix::<f64>::identity(m, m);
    l[(0, 0)] += 1.0;
    for i in 0..m {
        l[(i, 2)] += b[i];
    }
    l
}

/// `L h` for a coefficient vector of full basis length.
pub fn collision_apply(coeffs: &[Complex64], basis: &SpectralBasis) -> Result<Vec<Complex64>> {
    if coeffs.len() != basis.order() {
        return Err(Error::Shape(alloc::format!(
            "{} coefficients for a basis of {} functions",
            coeffs.len(),
            basis.order()
        )));
    }
    let b = basis.gain_coefficients();
    let h2 = coeffs[2];
    Ok(coeffs
        .iter()
        .enumerate()
        .map(|(m, &h)| {
            let mut out = -h + h2 * b[m];
            if m == 0 {
                out += h;
            }
            out
        })
        .collect())
}

/// `(Re⟨h, L h⟩, -(1-α)/2 ‖(I - Π₀)h‖²)`.
pub fn coercivity_check(h: &[Complex64], params: &ModelParams, basis: &SpectralBasis) -> Result<(f64, f64)> {
    let lh = collision_apply(h, basis)?;
    let lhs = h.iter().zip(&lh).map(|(a, b)| (a.conj() * b).re).sum();
    let micro: f64 = h.iter().skip(1).map(|c| c.norm_sqr()).sum();
    Ok((lhs, -0.5 * (1.0 - params.alpha()) * micro))
}

/// Greatest eigenvalue of the two-variable form
/// `(α-1)V₁² - V₂² + √(1-α²) V₁V₂`; equals `(α-1)/2`.
pub fn quadratic_form_gap(alpha: f64) -> f64 {
    let off = 0.5 * (1.0 - alpha * alpha).max(0.0).sqrt();
    let m = nalgebra::Matrix2::new(alpha - 1.0, off, off, -1.0);
    let e = nalgebra::SymmetricEigen::new(m).eigenvalues;
    e[0].max(e[1])
}

/// Matrices of one Fourier mode.
#[derive(Debug, Clone)]
pub struct ModeBlock {
    pub k: i64,
    pub kappa: f64,
    pub c: f64,
    pub streaming: DMatrix<f64>,
    pub collision: DMatrix<f64>,
    pub generator: CMatrix,
    pub lyapunov: CMatrix,
}

/// Assemble the `m × m` block of mode `k ≠ 0`, `m = basis.order()`.
pub fn assemble_mode_block(
    k: i64,
    basis: &SpectralBasis,
    c: f64,
    convention: FrequencyConvention,
) -> Result<ModeBlock> {
    assemble_truncated(k, basis, basis.order(), c, convention)
}

/// [`assemble_mode_block`] truncated to the first `m` basis functions.
pub fn assemble_truncated(
    k: i64,
    basis: &SpectralBasis,
    m: usize,
    c: f64,
    convention: FrequencyConvention,
) -> Result<ModeBlock> {
    if k == 0 {
        return Err(Error::param(
            "k",
            "the k = 0 mode decouples and relaxes at unit rate; no block is needed",
        ));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::param(
            "c",
            alloc::format!("mixing parameter must lie in [0, 1), got {c}"),
        ));
    }
    if m < 3 || m > basis.order() {
        return Err(Error::Shape(alloc::format!(
            "truncation {m} outside 3..={}",
            basis.order()
        )));
    }
    let kappa = convention.kappa(k);
    let streaming = streaming_matrix(basis, m);
    let collision = collision_matrix(basis, m);
    let generator = -to_complex(&collision) + to_complex(&streaming) * Complex64::new(0.0, kappa);
    let mut lyapunov = CMatrix::identity(m, m);
    lyapunov[(0, 1)] = Complex64::new(0.0, -c / kappa);
    lyapunov[(1, 0)] = Complex64::new(0.0, c / kappa);
    Ok(ModeBlock {
        k,
        kappa,
        c,
        streaming,
        collision,
        generator,
        lyapunov,
    })
}

impl ModeBlock {
    pub fn dim(&self) -> usize {
        self.streaming.nrows()
    }

    /// `C*P + PC` minus its `P = I` part `-(L + Lᵀ)`.
    pub fn remainder(&self) -> CMatrix {
        let sym = to_complex(&(&self.collision + self.collision.transpose()));
        self.generator.adjoint() * &self.lyapunov + &self.lyapunov * &self.generator + sym
    }

    /// `C*P + PC - 2λP`.
    pub fn certificate_matrix(&self, lambda: f64) -> CMatrix {
        self.generator.adjoint() * &self.lyapunov + &self.lyapunov * &self.generator
            - &self.lyapunov * Complex64::new(2.0 * lambda, 0.0)
    }

    pub fn certificate_min_eigenvalue(&self, lambda: f64) -> f64 {
        hermitian_eigenvalues(&self.certificate_matrix(lambda))[0]
    }

    pub fn lyapunov_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.lyapunov)
    }
}
