//! Model parameters, the velocity grid and the velocity profiles that every
//! other module builds on: Maxwellians, the reservoir mixture and the uniform
//! steady state.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Coupling strength and reservoir temperatures.
///
/// Mass is normalized to one, so the uniform steady state has temperature and
/// pressure both equal to `(t1 + t2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelParams {
    alpha: f64,
    t1: f64,
    t2: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, t1: f64, t2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::param("alpha", alloc::format!("{alpha} is outside [0, 1]")));
        }
        if !(t1 > 0.0 && t1.is_finite()) {
            return Err(Error::param(
                "t1",
                alloc::format!("temperature must be positive, got {t1}"),
            ));
        }
        if !(t2 > 0.0 && t2.is_finite()) {
            return Err(Error::param(
                "t2",
                alloc::format!("temperature must be positive, got {t2}"),
            ));
        }
        Ok(Self { alpha, t1, t2 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// Temperature of the uniform steady state.
    pub fn t_inf(&self) -> f64 {
        0.5 * (self.t1 + self.t2)
    }

    /// Pressure of the uniform steady state (equal to `t_inf` at unit mass).
    pub fn p_inf(&self) -> f64 {
        self.t_inf()
    }

    pub fn t_max(&self) -> f64 {
        self.t1.max(self.t2)
    }

    pub fn t_min(&self) -> f64 {
        self.t1.min(self.t2)
    }

    /// Same temperatures, different coupling.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.t1, self.t2)
    }
}

/// Symmetric uniform velocity grid with trapezoid weights.
///
/// Nodes and weights live behind `Arc`, so cloning a grid is cheap and fields
/// built on the same grid can be compared by pointer.
#[derive(Debug, Clone)]
pub struct VelocityGrid {
    nodes: Arc<[f64]>,
    weights: Arc<[f64]>,
    cutoff: f64,
}

pub const DEFAULT_VELOCITY_NODES: usize = 512;
pub const DEFAULT_CUTOFF_SIGMAS: f64 = 8.0;

impl VelocityGrid {
    /// `n` nodes on `[-cutoff, cutoff]`, mirrored so that `nodes[n-1-j] == -nodes[j]` exactly.
    pub fn uniform(n: usize, cutoff: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::param(
                "velocity_nodes",
                alloc::format!("need at least 4 nodes, got {n}"),
            ));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::param("cutoff", alloc::format!("must be positive, got {cutoff}")));
        }
        let h = 2.0 * cutoff / (n - 1) as f64;
        let mut nodes = alloc::vec![0.0; n];
        for j in 0..n / 2 {
            let v = -cutoff + j as f64 * h;
            nodes[j] = v;
            nodes[n - 1 - j] = -v;
        }
        let mut weights = alloc::vec![h; n];
        weights[0] = 0.5 * h;
        weights[n - 1] = 0.5 * h;
        Ok(Self {
            nodes: nodes.into(),
            weights: weights.into(),
            cutoff,
        })
    }

    /// Default grid: cutoff `8 sqrt(max(t1, t2))` and 512 nodes, refined when the
    /// colder reservoir would be under-resolved by that spacing.
    pub fn for_params(params: &ModelParams) -> Self {
        let cutoff = DEFAULT_CUTOFF_SIGMAS * params.t_max().sqrt();
        let n = resolved_node_count(DEFAULT_VELOCITY_NODES, cutoff, params.t_min());
        Self::uniform(n, cutoff).expect("validated parameters give a valid grid")
    }

    /// Wider grid for the orthonormal velocity basis: the quadrature has to
    /// resolve polynomial moments of degree about `2 * order`.
    pub fn for_basis(params: &ModelParams, order: usize) -> Self {
        let sigmas = (DEFAULT_CUTOFF_SIGMAS).max((2.0 * (order as f64 + 8.0)).sqrt() + 6.0);
        let cutoff = sigmas * params.t_max().sqrt();
        let n = resolved_node_count(2 * DEFAULT_VELOCITY_NODES, cutoff, params.t_min());
        Self::uniform(n, cutoff).expect("validated parameters give a valid grid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn spacing(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// True when both grids are the same discretization.
    pub fn same_as(&self, other: &VelocityGrid) -> bool {
        Arc::ptr_eq(&self.nodes, &other.nodes) || (self.cutoff == other.cutoff && self.nodes[..] == other.nodes[..])
    }

    /// Quadrature of `values` against the grid weights.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        values.iter().zip(self.weights.iter()).map(|(f, w)| f * w).sum()
    }

    /// Quadrature of `v^power * values`.
    pub fn moment(&self, values: &[f64], power: i32) -> f64 {
        values
            .iter()
            .zip(self.nodes.iter().zip(self.weights.iter()))
            .map(|(f, (v, w))| f * w * v.powi(power))
            .sum()
    }
}

// Trapezoid sums of a Gaussian of standard deviation s are accurate to roughly
// exp(-2 pi^2 s^2 / h^2); keep h below 0.8 s for the coldest reservoir.
fn resolved_node_count(base: usize, cutoff: f64, t_min: f64) -> usize {
    let needed = (2.0 * cutoff / (0.8 * t_min.sqrt())).ceil() as usize + 1;
    let n = base.max(needed);
    n + n % 2
}

/// Centered Maxwellian with temperature `t` at a single velocity.
pub fn maxwellian_at(t: f64, v: f64) -> f64 {
    (-v * v / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Maxwellian with temperature `t` sampled on the grid.
pub fn maxwellian(t: f64, grid: &VelocityGrid) -> Result<Vec<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::param("temperature", alloc::format!("must be positive, got {t}")));
    }
    Ok(grid.nodes().iter().map(|&v| maxwellian_at(t, v)).collect())
}

/// Half-half mixture of the two reservoir Maxwellians.
pub fn reservoir_mix(params: &ModelParams, grid: &VelocityGrid) -> Vec<f64> {
    grid.nodes().iter().map(|&v| reservoir_mix_at(params, v)).collect()
}

pub fn reservoir_mix_at(params: &ModelParams, v: f64) -> f64 {
    0.5 * (maxwellian_at(params.t1(), v) + maxwellian_at(params.t2(), v))
}

/// Spatially uniform steady state `alpha M_{T_inf} + (1 - alpha) G`.
pub fn uniform_ness(params: &ModelParams, grid: &VelocityGrid) -> Vec<f64> {
    grid.nodes().iter().map(|&v| uniform_ness_at(params, v)).collect()
}

pub fn uniform_ness_at(params: &ModelParams, v: f64) -> f64 {
    let a = params.alpha();
    a * maxwellian_at(params.t_inf(), v) + (1.0 - a) * reservoir_mix_at(params, v)
}

/// Fourth velocity moment of the uniform steady state.
pub fn uniform_ness_fourth_moment(params: &ModelParams) -> f64 {
    let (a, t) = (params.alpha(), params.t_inf());
    3.0 * (a * t * t + (1.0 - a) * 0.5 * (params.t1().powi(2) + params.t2().powi(2)))
}

/// Sup-norm of `alpha M_f + (1 - alpha) rho_f G - f` for a spatially uniform
/// velocity profile `f`, with density and temperature taken from quadrature.
pub fn homogeneous_residual(f: &[f64], params: &ModelParams, grid: &VelocityGrid) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(Error::Shape(alloc::format!(
            "profile has {} entries, grid has {}",
            f.len(),
            grid.len()
        )));
    }
    let rho = grid.integrate(f);
    let pressure = grid.moment(f, 2);
    if rho <= 0.0 || pressure <= 0.0 {
        return Err(Error::Domain {
            what: "homogeneous density",
            min: rho.min(pressure),
            iteration: None,
        });
    }
    let temp = pressure / rho;
    let a = params.alpha();
    Ok(grid
        .nodes()
        .iter()
        .zip(f)
        .map(|(&v, &fv)| {
            let gain = a * rho * maxwellian_at(temp, v) + (1.0 - a) * rho * reservoir_mix_at(params, v);
            (gain - fv).abs()
        })
        .fold(0.0, f64::max))
}
