//! Fields stored by their coefficients `ĥ_m(k)` in the orthonormal basis.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::basis::SpectralBasis;
use crate::error::{Error, Result};
use crate::field::PhaseField;

/// `h(x, v) = Σ_k Σ_m ĥ_m(k) e^{2πikx} g_m(v)`, stored as `coeffs[(k + K) * M + m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalField {
    order: usize,
    basis_order: usize,
    coeffs: Vec<Complex64>,
}

impl ModalField {
    pub fn zeros(order: usize, basis_order: usize) -> Self {
        Self {
            order,
            basis_order,
            coeffs: alloc::vec![Complex64::new(0.0, 0.0); (2 * order + 1) * basis_order],
        }
    }

    /// Single real basis mode `amplitude · g_m(v) cos(2πkx)` (or `g_m` alone for `k = 0`).
    pub fn basis_mode(order: usize, basis_order: usize, k: usize, m: usize, amplitude: f64) -> Result<Self> {
        if k > order || m >= basis_order {
            return Err(Error::param(
                "mode",
                alloc::format!("(k={k}, m={m}) outside the truncation"),
            ));
        }
        let mut f = Self::zeros(order, basis_order);
        if k == 0 {
            f.mode_mut(0)[m] = Complex64::new(amplitude, 0.0);
        } else {
            f.mode_mut(k as i64)[m] = Complex64::new(0.5 * amplitude, 0.0);
            f.mode_mut(-(k as i64))[m] = Complex64::new(0.5 * amplitude, 0.0);
        }
        Ok(f)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn basis_order(&self) -> usize {
        self.basis_order
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mode(&self, k: i64) -> &[Complex64] {
        let i = (k + self.order as i64) as usize;
        &self.coeffs[i * self.basis_order..(i + 1) * self.basis_order]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut [Complex64] {
        let i = (k + self.order as i64) as usize;
        &mut self.coeffs[i * self.basis_order..(i + 1) * self.basis_order]
    }

    /// Make `ĥ(-k) = conj(ĥ(k))` by averaging the two halves.
    pub fn enforce_reality(&mut self) {
        for c in self.mode_mut(0) {
            c.im = 0.0;
        }
        for k in 1..=self.order as i64 {
            for m in 0..self.basis_order {
                let c = 0.5 * (self.mode(k)[m] + self.mode(-k)[m].conj());
                self.mode_mut(k)[m] = c;
                self.mode_mut(-k)[m] = c.conj();
            }
        }
    }

    /// Global mass `∫∫ h`, the coefficient of `g_0` at `k = 0`.
    pub fn global_mass(&self) -> f64 {
        self.mode(0)[0].re
    }

    /// `‖h‖_{H_α}` or `‖h‖_{H¹_α}` (Parseval in both variables).
    pub fn norm(&self, sobolev: bool) -> f64 {
        let o = self.order as i64;
        (-o..=o)
            .map(|k| {
                let w = if sobolev {
                    1.0 + (2.0 * PI * k as f64).powi(2)
                } else {
                    1.0
                };
                w * self.mode(k).iter().map(|c| c.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            order: self.order,
            basis_order: self.basis_order,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Project a phase field onto the first `basis.order()` functions.
    pub fn from_phase_field(h: &PhaseField, basis: &SpectralBasis) -> Result<Self> {
        if !h.grid().same_as(basis.grid()) {
            return Err(Error::Shape("field and basis use different velocity grids".into()));
        }
        let mut f = Self::zeros(h.order(), basis.order());
        let o = h.order() as i64;
        for k in -o..=o {
            let c = basis.coefficients(h.mode(k))?;
            f.mode_mut(k).copy_from_slice(&c);
        }
        Ok(f)
    }

    /// Velocity values on the basis grid.
    pub fn to_phase_field(&self, basis: &SpectralBasis) -> Result<PhaseField> {
        if self.basis_order > basis.order() {
            return Err(Error::Shape(alloc::format!(
                "{} coefficients per mode but the basis has {} functions",
                self.basis_order,
                basis.order()
            )));
        }
        let mut h = PhaseField::zeros(self.order, basis.grid());
        let o = self.order as i64;
        for k in -o..=o {
            let v = basis.synthesize(self.mode(k));
            h.mode_mut(k).copy_from_slice(&v);
        }
        Ok(h)
    }
}
