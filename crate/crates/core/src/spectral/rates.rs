//! Explicit hypocoercive rate and numerical spectral gaps per Fourier mode.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::{c_alpha_closed_form, SpectralBasis};
use super::blocks::{assemble_truncated, collision_matrix, FrequencyConvention};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, hermitian_min_eigenvalue, to_complex};
use crate::model::ModelParams;

/// Which branch of the explicit rate applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RateCase {
    /// `c_α²(1-α)/(2√T∞) < 1/2`: `λ = (1-α)/8`.
    Collisional,
    /// `c_α²(1-α)/(2√T∞) >= 1/2`: `λ = √T∞/8`.
    Transport,
    /// `α = 1`: no rate.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExplicitRate {
    /// Prefactor `C` in `‖h_t‖ <= C e^{-λt} ‖h_0‖`.
    pub prefactor: f64,
    pub lambda: f64,
    /// Mixing parameter of the Lyapunov matrix.
    pub c: f64,
    /// `c_α²(1-α)/(2√T∞)`, whose comparison with 1/2 selects the case.
    pub selector: f64,
    pub case: RateCase,
    /// `½√T∞ min{c, (1-α)/√T∞ - c c_α^{-2}} (1-c)`, the rate from the proof's final inequality.
    pub proof_lambda: f64,
}

pub fn explicit_rate(params: &ModelParams) -> ExplicitRate {
    let alpha = params.alpha();
    let st = params.t_inf().sqrt();
    let c2 = c_alpha_closed_form(params).powi(2);
    let selector = c2 * (1.0 - alpha) / (2.0 * st);
    if alpha >= 1.0 {
        return ExplicitRate {
            prefactor: 4.0,
            lambda: 0.0,
            c: 0.0,
            selector,
            case: RateCase::Degenerate,
            proof_lambda: 0.0,
        };
    }
    let c = selector.min(0.5);
    let (lambda, case) = if selector < 0.5 {
        ((1.0 - alpha) / 8.0, RateCase::Collisional)
    } else {
        (st / 8.0, RateCase::Transport)
    };
    let proof_lambda = 0.5 * st * c.min((1.0 - alpha) / st - c / c2) * (1.0 - c);
    ExplicitRate {
        prefactor: 4.0,
        lambda,
        c,
        selector,
        case,
        proof_lambda,
    }
}

/// Numerical gap of one mode at truncation `m` (and `m + 8` when available).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GapReport {
    pub k: i64,
    pub m: usize,
    /// Smallest real part of the spectrum of `C_k`.
    pub gap: f64,
    /// Same quantity at truncation `m + 8`, if the basis is large enough.
    pub gap_extended: Option<f64>,
    /// `|gap - gap_extended| <= 1e-6`.
    pub stable: bool,
    pub lambda: f64,
    /// Smallest eigenvalue of `C*P + PC - 2λP`.
    pub certificate_min_eig: f64,
}

impl GapReport {
    pub fn gap_exceeds_lambda(&self) -> bool {
        self.gap >= self.lambda
    }
}

/// Smallest real part of the spectrum of the `m × m` generator of mode `k`.
///
/// For `k = 0` the density and energy coefficients are fixed at zero, as in the
/// zero-mass, zero-energy-perturbation setting; the remaining block relaxes at rate 1.
pub fn numeric_gap(
    k: i64,
    params: &ModelParams,
    basis: &SpectralBasis,
    m: usize,
    convention: FrequencyConvention,
) -> Result<GapReport> {
    if m < 3 || m > basis.order() {
        return Err(Error::Shape(alloc::format!(
            "truncation {m} outside 3..={}",
            basis.order()
        )));
    }
    let rate = explicit_rate(params);
    let gap_at = |m: usize| -> Result<(f64, f64)> {
        if k == 0 {
            let keep: Vec<usize> = (0..m).filter(|&i| i != 0 && i != 2).collect();
            let l = collision_matrix(basis, m);
            let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| -l[(keep[i], keep[j])]);
            let c = to_complex(&sub);
            let gap = min_real(&eigenvalues(&c)?);
            // P_0 = I on this subspace.
            let cert = hermitian_min_eigenvalue(&(c.adjoint() + &c)) - 2.0 * rate.lambda;
            Ok((gap, cert))
        } else {
            let blk = assemble_truncated(k, basis, m, rate.c, convention)?;
            let gap = min_real(&eigenvalues(&blk.generator)?);
            Ok((gap, blk.certificate_min_eigenvalue(rate.lambda)))
        }
    };
    let (gap, cert) = gap_at(m)?;
    let gap_extended = if m + 8 <= basis.order() {
        Some(gap_at(m + 8)?.0)
    } else {
        None
    };
    Ok(GapReport {
        k,
        m,
        gap,
        gap_extended,
        stable: gap_extended.is_some_and(|g| (g - gap).abs() <= 1e-6),
        lambda: rate.lambda,
        certificate_min_eig: cert,
    })
}

fn min_real(e: &[num_complex::Complex64]) -> f64 {
    e.iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

/// Gap reports for `k = 0..=kmax`.
pub fn gap_table(
    params: &ModelParams,
    basis: &SpectralBasis,
    kmax: i64,
    m: usize,
    convention: FrequencyConvention,
) -> Result<Vec<GapReport>> {
    (0..=kmax)
        .map(|k| numeric_gap(k, params, basis, m, convention))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VelocityGrid;
    use crate::spectral::basis::build_basis;

    #[test]
    fn case_selection() {
        let r = explicit_rate(&ModelParams::new(0.0, 1.0, 1.0).unwrap());
        assert_eq!(r.case, RateCase::Collisional);
        assert!((r.selector - 0.25).abs() < 1e-15);
        assert_eq!(r.lambda, 0.125);
        assert_eq!(r.prefactor, 4.0);
        let d = explicit_rate(&ModelParams::new(1.0, 1.0, 1.0).unwrap());
        assert_eq!(d.case, RateCase::Degenerate);
        assert_eq!(d.lambda, 0.0);
        // Cold reservoirs make transport the bottleneck.
        let t = explicit_rate(&ModelParams::new(0.0, 0.01, 0.01).unwrap());
        assert_eq!(t.case, RateCase::Transport);
        assert!((t.lambda - 0.1 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn zero_mode_relaxes_at_unit_rate() {
        let p = ModelParams::new(0.3, 1.0, 3.0).unwrap();
        let b = build_basis(&p, &VelocityGrid::for_basis(&p, 16), 16).unwrap();
        let g = numeric_gap(0, &p, &b, 16, FrequencyConvention::TwoPi).unwrap();
        assert!((g.gap - 1.0).abs() < 1e-12);
        let g1 = numeric_gap(1, &p, &b, 8, FrequencyConvention::TwoPi).unwrap();
        assert!(g1.gap >= g1.lambda);
        assert!(g1.gap_extended.is_some());
        assert!(g1.certificate_min_eig >= -1e-8);
    }
}
