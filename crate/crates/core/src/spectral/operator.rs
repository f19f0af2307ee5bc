//! Function-space forms of the linearized operators, acting on phase fields.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::field::PhaseField;
use crate::model::{maxwellian, uniform_ness, ModelParams, VelocityGrid};

/// Velocity profiles the linearized collision operator needs on a grid.
#[derive(Debug, Clone)]
pub struct CollisionProfiles {
    pub f_inf: Vec<f64>,
    /// `(v²/T∞ - 1) M_{T∞}`.
    pub energy: Vec<f64>,
    /// `v²` at the nodes.
    pub v2: Vec<f64>,
}

impl CollisionProfiles {
    pub fn new(params: &ModelParams, grid: &VelocityGrid) -> Self {
        let t = params.t_inf();
        let m = maxwellian(t, grid).expect("positive temperature");
        let v2: Vec<f64> = grid.nodes().iter().map(|v| v * v).collect();
        Self {
            f_inf: uniform_ness(params, grid),
            energy: m.iter().zip(&v2).map(|(m, v2)| (v2 / t - 1.0) * m).collect(),
            v2,
        }
    }
}

/// `σ f∞ + (α/2)(τ/T∞ - σ)(v²/T∞ - 1) M_{T∞}`, the gain part of the linearized operator
/// for one mode, with `σ`, `τ` the zeroth and second velocity moments of `h`.
pub fn linearized_gain_mode(
    h: &[Complex64],
    weights: &[f64],
    profiles: &CollisionProfiles,
    params: &ModelParams,
    out: &mut [Complex64],
) {
    let t = params.t_inf();
    let sigma: Complex64 = h.iter().zip(weights).map(|(x, w)| x * w).sum();
    let tau: Complex64 = h
        .iter()
        .zip(weights)
        .zip(&profiles.v2)
        .map(|((x, w), v2)| x * (w * v2))
        .sum();
    let coeff = (tau / t - sigma) * (0.5 * params.alpha());
    for ((o, f), e) in out.iter_mut().zip(&profiles.f_inf).zip(&profiles.energy) {
        *o = sigma * f + coeff * e;
    }
}

/// Linearized collision operator `L_α h`, mode by mode.
pub fn linearized_collision(h: &PhaseField, params: &ModelParams) -> PhaseField {
    LinearOperators::new(params, h.grid()).collision(h)
}

/// Free streaming `v ∂ₓ h`.
pub fn streaming_apply(h: &PhaseField) -> PhaseField {
    let mut out = h.clone();
    let nodes = h.grid().nodes().to_vec();
    let o = h.order() as i64;
    for k in -o..=o {
        let s = Complex64::new(0.0, 2.0 * PI * k as f64);
        for (dst, v) in out.mode_mut(k).iter_mut().zip(&nodes) {
            *dst *= s * v;
        }
    }
    out
}

/// Projection `Π₀ h = (∫ h dv) f∞`.
pub fn macroscopic_projection(h: &PhaseField, params: &ModelParams) -> PhaseField {
    LinearOperators::new(params, h.grid()).projection(h)
}

/// Auxiliary operator `A h = -[(1 - T∞ ∂ₓ²)^{-1} ∂ₓ j] f∞`, `j = ∫ v h dv`.
pub fn auxiliary_apply(h: &PhaseField, params: &ModelParams) -> PhaseField {
    LinearOperators::new(params, h.grid()).auxiliary(h)
}

/// The linearized operators with their velocity profiles precomputed for one grid.
#[derive(Debug, Clone)]
pub struct LinearOperators {
    params: ModelParams,
    grid: VelocityGrid,
    profiles: CollisionProfiles,
    weights: Vec<f64>,
}

impl LinearOperators {
    pub fn new(params: &ModelParams, grid: &VelocityGrid) -> Self {
        Self {
            params: *params,
            grid: grid.clone(),
            profiles: CollisionProfiles::new(params, grid),
            weights: grid.weights().to_vec(),
        }
    }

    fn check(&self, h: &PhaseField) {
        assert!(h.grid().same_as(&self.grid), "field lives on a different velocity grid");
    }

    /// `L_α h`.
    pub fn collision(&self, h: &PhaseField) -> PhaseField {
        self.check(h);
        let mut out = h.clone();
        let o = h.order() as i64;
        let mut gain = alloc::vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for k in -o..=o {
            linearized_gain_mode(h.mode(k), &self.weights, &self.profiles, &self.params, &mut gain);
            for (dst, g) in out.mode_mut(k).iter_mut().zip(&gain) {
                *dst = g - *dst;
            }
        }
        out
    }

    /// `Π₀ h`.
    pub fn projection(&self, h: &PhaseField) -> PhaseField {
        self.check(h);
        let rho = h.velocity_moment(0);
        PhaseField::tensor(&rho, &self.grid, &self.profiles.f_inf).expect("profile built on the field's grid")
    }

    /// `A h`.
    pub fn auxiliary(&self, h: &PhaseField) -> PhaseField {
        self.check(h);
        let t = self.params.t_inf();
        let j = h.velocity_moment(1);
        let o = h.order() as i64;
        let mut out = PhaseField::zeros(h.order(), &self.grid);
        for k in -o..=o {
            let kappa = 2.0 * PI * k as f64;
            let c = -j.mode(k) * Complex64::new(0.0, kappa) / (1.0 + t * kappa * kappa);
            for (dst, f) in out.mode_mut(k).iter_mut().zip(&self.profiles.f_inf) {
                *dst = c * f;
            }
        }
        out
    }
}
