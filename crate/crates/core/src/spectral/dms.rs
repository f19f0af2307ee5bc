//! Constants of the abstract hypocoercivity scheme for the linearized problem,
//! measured on a random corpus and checked against the per-mode modified entropy.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::SpectralBasis;
use super::blocks::{collision_matrix, streaming_matrix};
use super::modal::ModalField;
use super::operator::{streaming_apply, LinearOperators};
use crate::corpus;
use crate::error::{Error, Result};
use crate::field::{weighted_norm_with, PhaseField};
use crate::linalg::{hermitian_min_eigenvalue, to_complex, CMatrix};
use crate::model::{uniform_ness, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DmsOptions {
    pub samples: usize,
    pub seed: u64,
    /// Spatial truncation of corpus fields.
    pub order: usize,
    /// Modes `0..=check_modes` used in the per-mode entropy check.
    pub check_modes: usize,
}

impl Default for DmsOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            order: 4,
            check_modes: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DmsConstants {
    /// `(1-α)/2`.
    pub lambda_m: f64,
    /// Smallest eigenvalue of `-(L + Lᵀ)/2` off the density direction, at the basis truncation.
    pub lambda_m_measured: f64,
    /// `T∞`.
    pub lambda_macro: f64,
    /// Smallest `‖SΠ₀h‖² / ‖Π₀h‖²` over nonzero modes, divided by `T∞`.
    pub macro_ratio_min: f64,
    /// Corpus sup of `(‖AS(1-Π₀)h‖ + ‖ALh‖) / ‖(1-Π₀)h‖`.
    pub c_m_measured: f64,
    /// `√(c_α^{-2} + 1/4)`, the supremum of the same quotient over all fields.
    pub c_m_bound: f64,
    /// Constant used in the scheme: the larger of the two.
    pub c_m: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub prefactor: f64,
    /// Corpus sup of `‖Ah‖ / ‖(1-Π₀)h‖` (at most 1/2).
    pub aux_ratio_max: f64,
    /// Corpus sup of `‖SAh‖ / ‖(1-Π₀)h‖` (at most 1).
    pub streaming_aux_ratio_max: f64,
    /// Largest violation of the two auxiliary bounds over the corpus.
    pub explicit_bound_violation: f64,
    /// Smallest eigenvalue of `-(G*Q + QG) - 2λQ` over the checked modes,
    /// `G = L - iκS`, `Q = I + ε(A + A*)`.
    pub entropy_certificate_min_eig: f64,
    pub samples: usize,
}

/// Measure the scheme constants and derive `(λ, C)`.
pub fn dms_constants(params: &ModelParams, basis: &SpectralBasis, options: &DmsOptions) -> Result<DmsConstants> {
    if params.alpha() >= 1.0 {
        return Err(Error::param("alpha", "microscopic coercivity vanishes at alpha = 1"));
    }
    let t = params.t_inf();
    let grid = basis.grid();
    let f_inf = uniform_ness(params, grid);
    let norm = |h: &PhaseField| weighted_norm_with(h, &f_inf, false).expect("same grid");
    let m = basis.order();
    let mut rng = corpus::rng(options.seed);
    let ops = LinearOperators::new(params, grid);

    let mut aux_max: f64 = 0.0;
    let mut saux_max: f64 = 0.0;
    let mut c_m_measured: f64 = 0.0;
    let mut violation: f64 = 0.0;
    for s in 0..options.samples {
        let modal = random_field(&mut rng, options.order, m, s % 4 == 3);
        let h = modal.to_phase_field(basis)?;
        let pi0 = ops.projection(&h);
        let micro = h.combine(1.0, &pi0, -1.0)?;
        let micro_norm = norm(&micro);
        if micro_norm == 0.0 {
            continue;
        }
        let ah = ops.auxiliary(&h);
        let sah = streaming_apply(&ah);
        let (na, nsa) = (norm(&ah), norm(&sah));
        violation = violation.max(na - 0.5 * micro_norm).max(nsa - micro_norm);
        aux_max = aux_max.max(na / micro_norm);
        saux_max = saux_max.max(nsa / micro_norm);
        let as_micro = ops.auxiliary(&streaming_apply(&micro));
        let al = ops.auxiliary(&ops.collision(&h));
        c_m_measured = c_m_measured.max((norm(&as_micro) + norm(&al)) / micro_norm);
    }

    // ‖S(σ f∞)‖² = (2πk)² T∞ |σ̂|² per mode, by quadrature.
    let mut macro_ratio_min = f64::INFINITY;
    for k in 1..=options.check_modes.max(1) as i64 {
        let mut probe = PhaseField::zeros(k as usize, grid);
        for (d, f) in probe.mode_mut(k).iter_mut().zip(&f_inf) {
            *d = Complex64::new(*f, 0.0);
        }
        let s = streaming_apply(&probe);
        let ratio = norm(&s).powi(2) / norm(&probe).powi(2);
        macro_ratio_min = macro_ratio_min.min(ratio / t);
    }

    let l = collision_matrix(basis, m);
    let sym = -(&l + l.transpose()) * 0.5;
    let micro_block = sym.view((1, 1), (m - 1, m - 1)).into_owned();
    let lambda_m_measured = nalgebra::SymmetricEigen::new(micro_block).eigenvalues.min();

    let lambda_m = 0.5 * (1.0 - params.alpha());
    let lambda_macro = t;
    let c_alpha = basis.c_alpha();
    let c_m_bound = (1.0 / (c_alpha * c_alpha) + 0.25).sqrt();
    let c_m = c_m_bound.max(c_m_measured);
    let scheme = scheme_constants(lambda_m, lambda_macro, c_m);

    let entropy_certificate_min_eig = (0..=options.check_modes as i64)
        .map(|k| entropy_certificate(k, basis, scheme.epsilon, scheme.lambda))
        .fold(f64::INFINITY, f64::min);

    Ok(DmsConstants {
        lambda_m,
        lambda_m_measured,
        lambda_macro,
        macro_ratio_min,
        c_m_measured,
        c_m_bound,
        c_m,
        epsilon: scheme.epsilon,
        delta: scheme.delta,
        kappa: scheme.kappa,
        lambda: scheme.lambda,
        prefactor: scheme.prefactor,
        aux_ratio_max: aux_max,
        streaming_aux_ratio_max: saux_max,
        explicit_bound_violation: violation,
        entropy_certificate_min_eig,
        samples: options.samples,
    })
}

/// Tuning parameters and resulting rate of the scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConstants {
    pub delta: f64,
    pub epsilon: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub prefactor: f64,
}

/// `δ` balances the macroscopic term; `ε` then keeps the microscopic term at
/// half of `λ_m` after Young's inequality on `‖(1-Π₀)h‖ ‖h‖`.
pub fn scheme_constants(lambda_m: f64, lambda_macro: f64, c_m: f64) -> SchemeConstants {
    let macro_gain = lambda_macro / (1.0 + lambda_macro);
    let delta = macro_gain / (1.0 + c_m);
    let epsilon = (lambda_m / ((1.0 + c_m) * (1.0 / delta + delta))).min(0.5);
    let kappa = (0.5 * lambda_m).min(0.5 * epsilon * macro_gain);
    SchemeConstants {
        delta,
        epsilon,
        kappa,
        lambda: kappa / (1.0 + epsilon),
        prefactor: ((1.0 + epsilon) / (1.0 - epsilon)).sqrt(),
    }
}

/// Smallest eigenvalue of `-(G*Q + QG) - 2λQ` for mode `k`; on `k = 0` the
/// density coefficient is removed (zero global mass).
pub fn entropy_certificate(k: i64, basis: &SpectralBasis, epsilon: f64, lambda: f64) -> f64 {
    let m = basis.order();
    let t = basis.params().t_inf();
    let kappa = 2.0 * PI * k as f64;
    let g =
        to_complex(&collision_matrix(basis, m)) - to_complex(&streaming_matrix(basis, m)) * Complex64::new(0.0, kappa);
    let mut a = CMatrix::zeros(m, m);
    a[(0, 1)] = Complex64::new(0.0, -kappa * t.sqrt() / (1.0 + t * kappa * kappa));
    let q = CMatrix::identity(m, m) + (&a + a.adjoint()) * Complex64::new(epsilon, 0.0);
    let mut cert = -(g.adjoint() * &q + &q * &g) - &q * Complex64::new(2.0 * lambda, 0.0);
    if k == 0 {
        cert = cert.view((1, 1), (m - 1, m - 1)).into_owned();
    }
    hermitian_min_eigenvalue(&cert)
}

// Random zero-mass field; `sparse` fields load a single mode's h_1, h_2 only,
// which is where the auxiliary quotients approach their suprema.
fn random_field(rng: &mut corpus::CorpusRng, order: usize, m: usize, sparse: bool) -> ModalField {
    let mut f = ModalField::zeros(order, m);
    if sparse {
        let k = 1 + (corpus::uniform(rng, 0.0, order as f64) as usize).min(order - 1);
        let c = corpus::random_complex(rng, 2);
        f.mode_mut(k as i64)[1] = c[0];
        f.mode_mut(k as i64)[2] = c[1];
    } else {
        let o = order as i64;
        for k in -o..=o {
            let decay = corpus::uniform(rng, 0.05, 1.0);
            let c: Vec<Complex64> = corpus::random_complex(rng, m)
                .into_iter()
                .enumerate()
                .map(|(i, z)| z * decay.powi(i as i32))
                .collect();
            f.mode_mut(k).copy_from_slice(&c);
        }
    }
    f.mode_mut(0)[0] = Complex64::new(0.0, 0.0);
    f.enforce_reality();
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VelocityGrid;
    use crate::spectral::basis::build_basis;
    use crate::spectral::operator::auxiliary_apply;

    #[test]
    fn small_corpus() {
        let p = ModelParams::new(0.3, 1.0, 3.0).unwrap();
        let b = build_basis(&p, &VelocityGrid::for_params(&p), 12).unwrap();
        let opts = DmsOptions {
            samples: 200,
            ..Default::default()
        };
        let d = dms_constants(&p, &b, &opts).unwrap();
        assert!(d.explicit_bound_violation <= 1e-9);
        assert!(d.aux_ratio_max <= 0.5 + 1e-9);
        assert!(d.macro_ratio_min >= 1.0);
        assert!(d.c_m_measured <= d.c_m_bound + 1e-9);
        assert!(d.lambda > 0.0);
        assert!(d.lambda_m_measured >= d.lambda_m - 1e-9);
        assert!(
            d.entropy_certificate_min_eig >= -1e-9,
            "{}",
            d.entropy_certificate_min_eig
        );
    }

    #[test]
    fn aux_vanishes_without_current() {
        let p = ModelParams::new(0.3, 1.0, 3.0).unwrap();
        let g = VelocityGrid::for_params(&p);
        let rho = crate::field::DensityProfile::from_trig(3, 0.0, &[(1, 1.0, 0.0)]).unwrap();
        let h = PhaseField::tensor(&rho, &g, &uniform_ness(&p, &g)).unwrap();
        let a = auxiliary_apply(&h, &p);
        assert!(a.data().iter().all(|c| c.norm() < 1e-14));
    }
}
