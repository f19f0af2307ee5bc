//! Orthonormal velocity basis `g_m = H_m f∞` for the weight `1/f∞`, built by
//! the Stieltjes procedure on the grid measure `w_j f∞(v_j)`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{maxwellian, uniform_ness, ModelParams, VelocityGrid};

#[derive(Debug, Clone)]
pub struct SpectralBasis {
    order: usize,
    params: ModelParams,
    grid: VelocityGrid,
    f_inf: Vec<f64>,
    // polys[m * nv + j] = H_m(v_j)
    polys: Vec<f64>,
    // beta[m - 1] = β_m, the off-diagonal recurrence coefficient in v
    beta: Vec<f64>,
    diag: Vec<f64>,
}

/// Build `M` orthonormal functions; see [`SpectralBasis`].
pub fn build_basis(params: &ModelParams, grid: &VelocityGrid, m: usize) -> Result<SpectralBasis> {
    if m < 3 {
        return Err(Error::param(
            "basis_order",
            alloc::format!("need at least 3 functions, got {m}"),
        ));
    }
    let nv = grid.len();
    if 4 * m > nv {
        return Err(Error::Conditioning {
            order: m,
            suggested_cap: nv / 4,
        });
    }
    let f_inf = uniform_ness(params, grid);
    let mu: Vec<f64> = grid.weights().iter().zip(&f_inf).map(|(w, f)| w * f).collect();
    let nodes = grid.nodes();
    let inner = |p: &[f64], q: &[f64]| -> f64 { p.iter().zip(q).zip(&mu).map(|((a, b), w)| a * b * w).sum() };

    let mut polys: Vec<f64> = Vec::with_capacity(m * nv);
    let mass = mu.iter().sum::<f64>();
    polys.extend(core::iter::repeat_n(1.0 / mass.sqrt(), nv));
    let mut beta = Vec::with_capacity(m - 1);
    let mut diag = Vec::with_capacity(m - 1);
    for n in 0..m - 1 {
        let cur = &polys[n * nv..(n + 1) * nv];
        let mut q: Vec<f64> = cur.iter().zip(nodes).map(|(h, v)| h * v).collect();
        let scale = inner(&q, &q).sqrt();
        let a_n = inner(&q, cur);
        diag.push(a_n);
        for j in 0..nv {
            q[j] -= a_n * cur[j];
        }
        if n > 0 {
            let b = beta[n - 1];
            let prev = &polys[(n - 1) * nv..n * nv];
            for j in 0..nv {
                q[j] -= b * prev[j];
            }
        }
        // Two passes of full reorthogonalization.
        for _ in 0..2 {
            for i in 0..=n {
                let hi = &polys[i * nv..(i + 1) * nv];
                let d = inner(&q, hi);
                for j in 0..nv {
                    q[j] -= d * hi[j];
                }
            }
        }
        let b = inner(&q, &q).sqrt();
        if !b.is_finite() || b <= 1e-10 * scale {
            return Err(Error::Conditioning {
                order: n + 2,
                suggested_cap: n + 1,
            });
        }
        beta.push(b);
        polys.extend(q.iter().map(|x| x / b));
    }
    Ok(SpectralBasis {
        order: m,
        params: *params,
        grid: grid.clone(),
        f_inf,
        polys,
        beta,
        diag,
    })
}

/// `c_α` from `c_α^{-2} = 3(α + (1-α)(2 - T₁T₂/T∞²)) - 1`.
pub fn c_alpha_closed_form(params: &ModelParams) -> f64 {
    let (a, t) = (params.alpha(), params.t_inf());
    let inv_sq = 3.0 * (a + (1.0 - a) * (2.0 - params.t1() * params.t2() / (t * t))) - 1.0;
    1.0 / inv_sq.sqrt()
}

impl SpectralBasis {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn f_inf(&self) -> &[f64] {
        &self.f_inf
    }

    /// Polynomial factor `H_m` at the grid nodes.
    pub fn h(&self, m: usize) -> &[f64] {
        let nv = self.grid.len();
        &self.polys[m * nv..(m + 1) * nv]
    }

    /// Basis function `g_m = H_m f∞` at the grid nodes.
    pub fn g(&self, m: usize) -> Vec<f64> {
        self.h(m).iter().zip(&self.f_inf).map(|(h, f)| h * f).collect()
    }

    /// Dimensionless recurrence coefficient `a_m = β_m / √T∞`, `1 <= m < M`.
    pub fn a(&self, m: usize) -> f64 {
        self.beta[m - 1] / self.params.t_inf().sqrt()
    }

    /// `a_1, ..., a_{M-1}`.
    pub fn recurrence(&self) -> Vec<f64> {
        (1..self.order).map(|m| self.a(m)).collect()
    }

    /// Diagonal recurrence coefficients; zero for an even weight.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Normalization of `H_2 = c_α (v²/T∞ - 1)` from the recurrence (`a_2 = 1/c_α`).
    pub fn c_alpha(&self) -> f64 {
        1.0 / self.a(2)
    }

    /// Coefficients `⟨h, g_m⟩` of a velocity profile in the `1/f∞` inner product.
    pub fn coefficients(&self, h: &[Complex64]) -> Result<Vec<Complex64>> {
        let nv = self.grid.len();
        if h.len() != nv {
            return Err(Error::Shape(alloc::format!(
                "profile has {} entries, grid has {nv}",
                h.len()
            )));
        }
        let w = self.grid.weights();
        Ok((0..self.order)
            .map(|m| self.h(m).iter().zip(h).zip(w).map(|((p, x), w)| x * (p * w)).sum())
            .collect())
    }

    /// Velocity profile `Σ c_m g_m`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let nv = self.grid.len();
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); nv];
        for (m, c) in coeffs.iter().enumerate().take(self.order) {
            for ((o, p), f) in out.iter_mut().zip(self.h(m)).zip(&self.f_inf) {
                *o += c * (p * f);
            }
        }
        out
    }

    /// Gram matrix `⟨g_m, g_n⟩` by quadrature.
    pub fn gram(&self) -> nalgebra::DMatrix<f64> {
        self.weighted_products(|_| 1.0)
    }

    /// `⟨v g_m, g_n⟩` by quadrature: tridiagonal with zero diagonal for an even weight.
    pub fn streaming_by_quadrature(&self) -> nalgebra::DMatrix<f64> {
        self.weighted_products(|v| v)
    }

    fn weighted_products<F: Fn(f64) -> f64>(&self, factor: F) -> nalgebra::DMatrix<f64> {
        let w: Vec<f64> = self
            .grid
            .weights()
            .iter()
            .zip(self.grid.nodes())
            .zip(&self.f_inf)
            .map(|((w, v), f)| w * f * factor(*v))
            .collect();
        nalgebra::DMatrix::from_fn(self.order, self.order, |i, j| {
            self.h(i)
                .iter()
                .zip(self.h(j))
                .zip(&w)
                .map(|((a, b), w)| a * b * w)
                .sum()
        })
    }

    /// `b_m = (α / 2c_α²) ∫ H_2 H_m M_{T∞} dv`, the gain column of the collision matrix.
    pub fn gain_coefficients(&self) -> Vec<f64> {
        let m_t = maxwellian(self.params.t_inf(), &self.grid).expect("positive temperature");
        let c = self.c_alpha();
        let scale = self.params.alpha() / (2.0 * c * c);
        let w = self.grid.weights();
        (0..self.order)
            .map(|m| {
                scale
                    * self
                        .h(2)
                        .iter()
                        .zip(self.h(m))
                        .zip(&m_t)
                        .zip(w)
                        .map(|(((a, b), mt), w)| a * b * mt * w)
                        .sum::<f64>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_functions_and_recurrence() {
        let p = ModelParams::new(0.3, 1.0, 3.0).unwrap();
        let grid = VelocityGrid::for_basis(&p, 24);
        let b = build_basis(&p, &grid, 24).unwrap();
        let t = p.t_inf();
        for (j, &v) in grid.nodes().iter().enumerate() {
            assert!((b.h(0)[j] - 1.0).abs() < 1e-12);
            assert!((b.h(1)[j] - v / t.sqrt()).abs() < 1e-10 * (1.0 + v.abs()));
        }
        assert!((b.a(1) - 1.0).abs() < 1e-10);
        assert!((b.c_alpha() - c_alpha_closed_form(&p)).abs() < 1e-8);
        let gram = b.gram();
        let id = nalgebra::DMatrix::<f64>::identity(24, 24);
        assert!((gram - id).amax() < 1e-8);
        let gain = b.gain_coefficients();
        assert!(gain[0].abs() < 1e-8 && gain[1].abs() < 1e-8);
        assert!((gain[2] - 0.3).abs() < 1e-8);
    }

    #[test]
    fn too_small_or_too_large() {
        let p = ModelParams::new(0.3, 1.0, 3.0).unwrap();
        let grid = VelocityGrid::uniform(32, 20.0).unwrap();
        assert!(build_basis(&p, &grid, 2).is_err());
        assert!(matches!(build_basis(&p, &grid, 16), Err(Error::Conditioning { .. })));
    }
}
