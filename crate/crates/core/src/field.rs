//! Truncated Fourier representations of densities `rho(x)` and phase-space
//! fields `f(x, v)` on the unit torus, plus their moments and weighted norms.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fourier;
use crate::model::{uniform_ness, ModelParams, VelocityGrid};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Real function on the torus stored by its modes `k in -K..=K`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    order: usize,
    modes: Vec<Complex64>,
}

impl DensityProfile {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            modes: alloc::vec![ZERO; 2 * order + 1],
        }
    }

    pub fn constant(order: usize, value: f64) -> Self {
        let mut p = Self::zeros(order);
        p.modes[order] = Complex64::new(value, 0.0);
        p
    }

    pub fn from_modes(order: usize, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != 2 * order + 1 {
            return Err(Error::Shape(alloc::format!(
                "expected {} modes for order {order}, got {}",
                2 * order + 1,
                modes.len()
            )));
        }
        Ok(Self { order, modes })
    }

    /// `mean + sum_k (a_k cos(2πkx) + b_k sin(2πkx))` from `(k, a_k, b_k)` triples.
    pub fn from_trig(order: usize, mean: f64, terms: &[(usize, f64, f64)]) -> Result<Self> {
        let mut p = Self::constant(order, mean);
        for &(k, a, b) in terms {
            if k == 0 || k > order {
                return Err(Error::param("k", alloc::format!("mode {k} outside 1..={order}")));
            }
            let c = Complex64::new(0.5 * a, -0.5 * b);
            p.modes[order + k] += c;
            p.modes[order - k] += c.conj();
        }
        Ok(p)
    }

    /// Projection of real samples `s(j/n)` onto the modes `|k| <= order`.
    pub fn from_samples(order: usize, samples: &[f64]) -> Self {
        let mut p = Self {
            order,
            modes: fourier::analyze_real(samples, order),
        };
        p.enforce_reality();
        p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn mode(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.order {
            return ZERO;
        }
        self.modes[(k + self.order as i64) as usize]
    }

    /// Set mode `k` and its conjugate partner `-k`.
    pub fn set_mode(&mut self, k: i64, value: Complex64) {
        let o = self.order as i64;
        assert!(k.abs() <= o, "mode {k} outside truncation {o}");
        if k == 0 {
            self.modes[self.order] = Complex64::new(value.re, 0.0);
        } else {
            self.modes[(o + k) as usize] = value;
            self.modes[(o - k) as usize] = value.conj();
        }
    }

    pub fn mean(&self) -> f64 {
        self.modes[self.order].re
    }

    /// Largest violation of `c(-k) = conj(c(k))`.
    pub fn reality_defect(&self) -> f64 {
        (0..=self.order)
            .map(|k| (self.modes[self.order + k] - self.modes[self.order - k].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn enforce_reality(&mut self) {
        let o = self.order;
        self.modes[o].im = 0.0;
        for k in 1..=o {
            let c = 0.5 * (self.modes[o + k] + self.modes[o - k].conj());
            self.modes[o + k] = c;
            self.modes[o - k] = c.conj();
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let o = self.order as i64;
        let mut s = self.mean();
        for k in 1..=o {
            let theta = 2.0 * PI * k as f64 * x;
            let c = self.mode(k);
            s += 2.0 * (c.re * theta.cos() - c.im * theta.sin());
        }
        s
    }

    /// Values at `x_j = j/n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        fourier::synthesize_real(&self.modes, n)
    }

    /// Values on the default verification grid (the collocation grid).
    pub fn sample_default(&self) -> Vec<f64> {
        self.sample(fourier::collocation_points(self.order))
    }

    pub fn min_on_grid(&self, n: usize) -> f64 {
        self.sample(n).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_abs_on_grid(&self, n: usize) -> f64 {
        self.sample(n).into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    /// L² norm on the torus (Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.modes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l2_distance(&self, other: &DensityProfile) -> f64 {
        let o = self.order.max(other.order) as i64;
        (-o..=o)
            .map(|k| (self.mode(k) - other.mode(k)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `a * self + b * other`, at the larger truncation of the two.
    pub fn combine(&self, a: f64, other: &DensityProfile, b: f64) -> DensityProfile {
        let order = self.order.max(other.order);
        let o = order as i64;
        let modes = (-o..=o).map(|k| self.mode(k) * a + other.mode(k) * b).collect();
        DensityProfile { order, modes }
    }

    pub fn scaled(&self, a: f64) -> DensityProfile {
        DensityProfile {
            order: self.order,
            modes: self.modes.iter().map(|c| c * a).collect(),
        }
    }

    /// Same function at a different truncation (modes beyond the new order are dropped).
    pub fn with_order(&self, order: usize) -> DensityProfile {
        let o = order as i64;
        DensityProfile {
            order,
            modes: (-o..=o).map(|k| self.mode(k)).collect(),
        }
    }
}

/// `f(x, v)` stored as `data[(k + K) * n_v + j]` for mode `k` and velocity node `j`.
#[derive(Debug, Clone)]
pub struct PhaseField {
    order: usize,
    grid: VelocityGrid,
    data: Vec<Complex64>,
}

impl PhaseField {
    pub fn zeros(order: usize, grid: &VelocityGrid) -> Self {
        Self {
            order,
            grid: grid.clone(),
            data: alloc::vec![ZERO; (2 * order + 1) * grid.len()],
        }
    }

    /// Spatially uniform field with the given velocity profile.
    pub fn uniform(order: usize, grid: &VelocityGrid, profile: &[f64]) -> Result<Self> {
        check_profile(grid, profile)?;
        let mut f = Self::zeros(order, grid);
        for (dst, &p) in f.mode_mut(0).iter_mut().zip(profile) {
            *dst = Complex64::new(p, 0.0);
        }
        Ok(f)
    }

    /// `rho(x) * profile(v)`.
    pub fn tensor(rho: &DensityProfile, grid: &VelocityGrid, profile: &[f64]) -> Result<Self> {
        check_profile(grid, profile)?;
        let order = rho.order();
        let mut f = Self::zeros(order, grid);
        for k in -(order as i64)..=order as i64 {
            let c = rho.mode(k);
            for (dst, &p) in f.mode_mut(k).iter_mut().zip(profile) {
                *dst = c * p;
            }
        }
        Ok(f)
    }

    /// Build from real samples `f(x_i, v_j)` given row by row for `x_i = i / n_x`.
    pub fn from_samples(order: usize, grid: &VelocityGrid, rows: &[Vec<f64>]) -> Result<Self> {
        let nx = rows.len();
        if nx <= 2 * order {
            return Err(Error::Shape(alloc::format!(
                "{nx} spatial samples cannot resolve order {order}"
            )));
        }
        let nv = grid.len();
        if rows.iter().any(|r| r.len() != nv) {
            return Err(Error::Shape("sample row length differs from the velocity grid".into()));
        }
        let mut f = Self::zeros(order, grid);
        let mut column = alloc::vec![0.0; nx];
        for j in 0..nv {
            for (i, row) in rows.iter().enumerate() {
                column[i] = row[j];
            }
            let modes = fourier::analyze_real(&column, order);
            f.set_column(j, &modes);
        }
        f.enforce_reality();
        Ok(f)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn mode(&self, k: i64) -> &[Complex64] {
        let n = self.grid.len();
        let i = (k + self.order as i64) as usize;
        &self.data[i * n..(i + 1) * n]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut [Complex64] {
        let n = self.grid.len();
        let i = (k + self.order as i64) as usize;
        &mut self.data[i * n..(i + 1) * n]
    }

    /// Modes `-K..=K` at velocity node `j`.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        let n = self.grid.len();
        (0..2 * self.order + 1).map(|i| self.data[i * n + j]).collect()
    }

    pub fn set_column(&mut self, j: usize, modes: &[Complex64]) {
        let n = self.grid.len();
        for (i, &c) in modes.iter().enumerate() {
            self.data[i * n + j] = c;
        }
    }

    pub(crate) fn enforce_reality(&mut self) {
        for v in self.mode_mut(0) {
            v.im = 0.0;
        }
        for k in 1..=self.order as i64 {
            let n = self.grid.len();
            for j in 0..n {
                let c = 0.5 * (self.mode(k)[j] + self.mode(-k)[j].conj());
                self.mode_mut(k)[j] = c;
                self.mode_mut(-k)[j] = c.conj();
            }
        }
    }

    pub fn reality_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for k in 0..=self.order as i64 {
            for (a, b) in self.mode(k).iter().zip(self.mode(-k)) {
                d = d.max((a - b.conj()).norm());
            }
        }
        d
    }

    /// `∫∫ f dx dv`.
    pub fn total_mass(&self) -> f64 {
        let w = self.grid.weights();
        self.mode(0).iter().zip(w).map(|(c, w)| c.re * w).sum()
    }

    /// Profile `x ↦ ∫ v^power f(x, v) dv`.
    pub fn velocity_moment(&self, power: i32) -> DensityProfile {
        let nodes = self.grid.nodes();
        let w = self.grid.weights();
        let weights: Vec<f64> = nodes.iter().zip(w).map(|(v, w)| w * v.powi(power)).collect();
        let o = self.order as i64;
        let modes = (-o..=o)
            .map(|k| self.mode(k).iter().zip(&weights).map(|(c, w)| c * w).sum())
            .collect();
        DensityProfile {
            order: self.order,
            modes,
        }
    }

    fn check_same(&self, other: &PhaseField) -> Result<()> {
        if self.order != other.order || !self.grid.same_as(&other.grid) {
            return Err(Error::Shape("phase fields use different discretizations".into()));
        }
        Ok(())
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &PhaseField, b: f64) -> Result<PhaseField> {
        self.check_same(other)?;
        Ok(PhaseField {
            order: self.order,
            grid: self.grid.clone(),
            data: self.data.iter().zip(&other.data).map(|(x, y)| x * a + y * b).collect(),
        })
    }

    pub fn scaled(&self, a: f64) -> PhaseField {
        PhaseField {
            order: self.order,
            grid: self.grid.clone(),
            data: self.data.iter().map(|x| x * a).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &PhaseField) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max))
    }

    /// Even and odd parts in `v`.
    pub fn parity_split(&self) -> (PhaseField, PhaseField) {
        let n = self.grid.len();
        let mut even = self.clone();
        let mut odd = self.clone();
        for k in -(self.order as i64)..=self.order as i64 {
            let src = self.mode(k).to_vec();
            let e = even.mode_mut(k);
            for j in 0..n {
                e[j] = 0.5 * (src[j] + src[n - 1 - j]);
            }
            let o = odd.mode_mut(k);
            for j in 0..n {
                o[j] = 0.5 * (src[j] - src[n - 1 - j]);
            }
        }
        (even, odd)
    }
}

fn check_profile(grid: &VelocityGrid, profile: &[f64]) -> Result<()> {
    if profile.len() != grid.len() {
        return Err(Error::Shape(alloc::format!(
            "velocity profile has {} entries, grid has {}",
            profile.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// Density, momentum, pressure and fourth-moment profiles of a field.
#[derive(Debug, Clone)]
pub struct Moments {
    pub rho: DensityProfile,
    pub momentum: DensityProfile,
    pub pressure: DensityProfile,
    pub fourth: DensityProfile,
}

pub fn compute_moments(f: &PhaseField) -> Moments {
    Moments {
        rho: f.velocity_moment(0),
        momentum: f.velocity_moment(1),
        pressure: f.velocity_moment(2),
        fourth: f.velocity_moment(4),
    }
}

/// `‖h‖_{H_α}` or, with `sobolev`, `‖h‖_{H¹_α}`, weighted by `1/f∞`.
pub fn weighted_norm(h: &PhaseField, params: &ModelParams, sobolev: bool) -> f64 {
    let weight = uniform_ness(params, h.grid());
    weighted_norm_with(h, &weight, sobolev).expect("weight built on the field's own grid")
}

/// [`weighted_norm`] with a precomputed steady-state profile.
pub fn weighted_norm_with(h: &PhaseField, f_inf: &[f64], sobolev: bool) -> Result<f64> {
    check_profile(h.grid(), f_inf)?;
    let w: Vec<f64> = h.grid().weights().iter().zip(f_inf).map(|(w, f)| w / f).collect();
    let o = h.order() as i64;
    let mut total = 0.0;
    for k in -o..=o {
        let s: f64 = h.mode(k).iter().zip(&w).map(|(c, w)| c.norm_sqr() * w).sum();
        let wk = if sobolev {
            1.0 + (2.0 * PI * k as f64).powi(2)
        } else {
            1.0
        };
        total += wk * s;
    }
    Ok(total.sqrt())
}
