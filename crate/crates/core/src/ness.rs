//! Steady states through the density fixed-point map.
//!
//! A density `ρ` determines the forcing `F[ρ] = α M[ρ] + (1-α) ρ G`, where
//! `M[ρ]` is the Maxwellian with density `ρ` and pressure `P∞`. The map
//! `Ψ[ρ] = ∫ (1 - v²∂ₓ²)^{-1} F[ρ] dv` has the steady-state densities as its
//! fixed points, and the steady state itself is rebuilt as `f = E - v ∂ₓ E`
//! with `E = (1 - v²∂ₓ²)^{-1} F[ρ]`.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::{DensityProfile, PhaseField};
use crate::fourier;
use crate::model::{maxwellian_at, reservoir_mix, reservoir_mix_at, ModelParams, VelocityGrid};
use crate::quadrature::{power_weighted_half_line, Composite};
use crate::transforms::{apply_resolvent, resolvent_symbol};

/// Default stopping tolerance of the Picard iteration.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap of the Picard iteration.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Precomputed pieces of `Ψ` for one parameter set, grid and truncation.
///
/// Fields (`M[ρ]`, `F[ρ]`) live on the velocity grid. The velocity integral in
/// `Ψ` uses its own half-line rule, graded toward `v = 0` where the resolvent
/// symbol of mode `K` varies on the scale `1/(2πK)`.
#[derive(Debug, Clone)]
pub struct PsiOperator {
    params: ModelParams,
    grid: VelocityGrid,
    order: usize,
    n_colloc: usize,
    mix: Vec<f64>,
    // Half-line rule for even integrands: weights already doubled.
    quad_nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    // symbols[k * Q + q] for k = 0..=K
    symbols: Vec<f64>,
    gamma: Vec<f64>,
}

/// Half-line rule for `∫_0^∞ f(v) s_k(v) dv`, `k <= order`, with `f` decaying on `√t_scale`.
fn resolvent_rule(order: usize, t_scale: f64) -> (Vec<f64>, Vec<f64>) {
    // Wide enough for local temperatures up to 4 t_scale (densities down to ρ∞/4).
    let end = 32.0 * t_scale.sqrt();
    let mut breaks = alloc::vec![0.0];
    let mut b = (1.0 / (2.0 * PI * order.max(1) as f64)).min(end) / 16.0;
    while b < end {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(end);
    Composite::new(16).rule_on_breaks(&breaks, 2)
}

impl PsiOperator {
    pub fn new(params: &ModelParams, grid: &VelocityGrid, order: usize) -> Self {
        let (quad_nodes, w) = resolvent_rule(order, params.t_max());
        let quad_weights: Vec<f64> = w.iter().map(|w| 2.0 * w).collect();
        let nq = quad_nodes.len();
        let mut symbols = Vec::with_capacity((order + 1) * nq);
        for k in 0..=order as i64 {
            symbols.extend(quad_nodes.iter().map(|v| resolvent_symbol(k, *v)));
        }
        let quad_mix: Vec<f64> = quad_nodes.iter().map(|v| reservoir_mix_at(params, *v)).collect();
        let gamma = (0..=order)
            .map(|k| {
                (0..nq)
                    .map(|q| quad_weights[q] * symbols[k * nq + q] * quad_mix[q])
                    .sum()
            })
            .collect();
        Self {
            params: *params,
            grid: grid.clone(),
            order,
            n_colloc: fourier::collocation_points(order),
            mix: reservoir_mix(params, grid),
            quad_nodes,
            quad_weights,
            symbols,
            gamma,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn collocation_points(&self) -> usize {
        self.n_colloc
    }

    /// `γ_k = ∫ G(v) / (1 + (2πkv)²) dv`.
    pub fn gamma(&self, k: usize) -> f64 {
        self.gamma[k]
    }

    fn symbol(&self, k: i64, q: usize) -> f64 {
        self.symbols[k.unsigned_abs() as usize * self.quad_nodes.len() + q]
    }

    /// Collocation samples of `rho`, rejecting non-positive values.
    pub fn positive_samples(&self, rho: &DensityProfile) -> Result<Vec<f64>> {
        let s = rho.with_order(self.order).sample(self.n_colloc);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::Domain {
                what: "density",
                min,
                iteration: None,
            });
        }
        Ok(s)
    }

    fn maxwellian_coefficients(&self, samples: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let p = self.params.p_inf();
        let norm = 1.0 / (2.0 * PI * p).sqrt();
        let a = samples.iter().map(|r| r.powf(1.5) * norm).collect();
        let b = samples.iter().map(|r| r / (2.0 * p)).collect();
        (a, b)
    }

    // Fourier modes of the collocation column `x_i ↦ value(i)`.
    fn column_modes(&self, column: &[f64]) -> Vec<Complex64> {
        fourier::analyze_real(column, self.order)
    }

    /// `M[ρ]` as a phase field.
    pub fn local_maxwellian(&self, rho: &DensityProfile) -> Result<PhaseField> {
        let samples = self.positive_samples(rho)?;
        let (a, b) = self.maxwellian_coefficients(&samples);
        let nv = self.grid.len();
        let nodes = self.grid.nodes();
        let weights = self.grid.weights();
        // Rescale each column so its discrete mass is exactly ρ(x_i).
        let a: Vec<f64> = (0..self.n_colloc)
            .map(|i| {
                let mass: f64 = nodes
                    .iter()
                    .zip(weights)
                    .map(|(v, w)| w * a[i] * (-b[i] * v * v).exp())
                    .sum();
                a[i] * samples[i] / mass
            })
            .collect();
        let mut f = PhaseField::zeros(self.order, &self.grid);
        let mut column = alloc::vec![0.0; self.n_colloc];
        for (j, v) in nodes.iter().enumerate().take(nv.div_ceil(2)) {
            let v2 = v * v;
            for i in 0..self.n_colloc {
                column[i] = a[i] * (-b[i] * v2).exp();
            }
            let modes = self.column_modes(&column);
            f.set_column(j, &modes);
            f.set_column(nv - 1 - j, &modes);
        }
        f.enforce_reality();
        Ok(f)
    }

    /// `F[ρ] = α M[ρ] + (1-α) ρ G`.
    pub fn forcing(&self, rho: &DensityProfile) -> Result<PhaseField> {
        let alpha = self.params.alpha();
        let rho = rho.with_order(self.order);
        let mixed = PhaseField::tensor(&rho, &self.grid, &self.mix)?;
        if alpha == 0.0 {
            self.positive_samples(&rho)?;
            return Ok(mixed);
        }
        let m = self.local_maxwellian(&rho)?;
        m.combine(alpha, &mixed, 1.0 - alpha)
    }

    /// `Ψ[ρ]`, integrating the resolvent mode by mode.
    ///
    /// The continuous map preserves the mean exactly; the output mean is set to
    /// the input mean so quadrature error cannot drift it over many iterations.
    pub fn apply(&self, rho: &DensityProfile) -> Result<DensityProfile> {
        let rho = rho.with_order(self.order);
        let samples = self.positive_samples(&rho)?;
        let alpha = self.params.alpha();
        let o = self.order as i64;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); 2 * self.order + 1];
        if alpha > 0.0 {
            let (a, b) = self.maxwellian_coefficients(&samples);
            let mut column = alloc::vec![0.0; self.n_colloc];
            for (j, v) in self.quad_nodes.iter().enumerate() {
                let v2 = v * v;
                for i in 0..self.n_colloc {
                    column[i] = a[i] * (-b[i] * v2).exp();
                }
                let modes = self.column_modes(&column);
                let cw = alpha * self.quad_weights[j];
                for k in -o..=o {
                    out[(k + o) as usize] += modes[(k + o) as usize] * (cw * self.symbol(k, j));
                }
            }
        }
        for k in -o..=o {
            out[(k + o) as usize] += rho.mode(k) * ((1.0 - alpha) * self.gamma[k.unsigned_abs() as usize]);
        }
        out[self.order] = rho.mode(0);
        let mut p = DensityProfile::from_modes(self.order, out)?;
        p.enforce_reality();
        Ok(p)
    }

    /// Linearization of `Ψ` at `rho_bar`.
    pub fn jacobian_at(&self, rho_bar: &DensityProfile) -> Result<PsiJacobian<'_>> {
        let samples = self.positive_samples(rho_bar)?;
        let (a, b) = self.maxwellian_coefficients(&samples);
        let p = self.params.p_inf();
        let n = self.n_colloc;
        let mut table = alloc::vec![0.0; self.quad_nodes.len() * n];
        if self.params.alpha() > 0.0 {
            for (j, v) in self.quad_nodes.iter().enumerate() {
                let v2 = v * v;
                for i in 0..n {
                    let m = a[i] * (-b[i] * v2).exp();
                    table[j * n + i] = (1.5 / samples[i] - v2 / (2.0 * p)) * m;
                }
            }
        }
        Ok(PsiJacobian { op: self, table })
    }
}

/// `DΨ[ρ̄]` with the Maxwellian derivative tabulated on the collocation grid.
#[derive(Debug, Clone)]
pub struct PsiJacobian<'a> {
    op: &'a PsiOperator,
    table: Vec<f64>,
}

impl PsiJacobian<'_> {
    pub fn apply(&self, sigma: &DensityProfile) -> DensityProfile {
        let op = self.op;
        let sigma = sigma.with_order(op.order);
        let alpha = op.params.alpha();
        let o = op.order as i64;
        let n = op.n_colloc;
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); 2 * op.order + 1];
        if alpha > 0.0 {
            let s = sigma.sample(n);
            let mut column = alloc::vec![0.0; n];
            for j in 0..op.quad_nodes.len() {
                let row = &self.table[j * n..(j + 1) * n];
                for i in 0..n {
                    column[i] = row[i] * s[i];
                }
                let modes = op.column_modes(&column);
                let cw = alpha * op.quad_weights[j];
                for k in -o..=o {
                    out[(k + o) as usize] += modes[(k + o) as usize] * (cw * op.symbol(k, j));
                }
            }
        }
        for k in -o..=o {
            out[(k + o) as usize] += sigma.mode(k) * ((1.0 - alpha) * op.gamma[k.unsigned_abs() as usize]);
        }
        let mut p = DensityProfile::from_modes(op.order, out).expect("sized by construction");
        p.enforce_reality();
        p
    }

    /// Real matrix of the map on zero-mean profiles in the orthonormal basis
    /// `√2 cos(2πkx), √2 sin(2πkx)`, `k = 1..=K`.
    pub fn real_matrix(&self) -> nalgebra::DMatrix<f64> {
        let order = self.op.order;
        let dim = 2 * order;
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        let amp = core::f64::consts::FRAC_1_SQRT_2;
        for col in 0..dim {
            let k = (col / 2 + 1) as i64;
            let c = if col % 2 == 0 {
                Complex64::new(amp, 0.0)
            } else {
                Complex64::new(0.0, -amp)
            };
            let mut e = DensityProfile::zeros(order);
            e.set_mode(k, c);
            let image = self.apply(&e);
            for row in 0..dim {
                let kr = (row / 2 + 1) as i64;
                let g = image.mode(kr);
                m[(row, col)] = if row % 2 == 0 {
                    2f64.sqrt() * g.re
                } else {
                    -(2f64.sqrt()) * g.im
                };
            }
        }
        m
    }
}

/// `M[ρ]` for a single call; see [`PsiOperator`] for repeated use.
pub fn local_maxwellian_of_density(
    rho: &DensityProfile,
    params: &ModelParams,
    grid: &VelocityGrid,
) -> Result<PhaseField> {
    PsiOperator::new(params, grid, rho.order()).local_maxwellian(rho)
}

pub fn forcing(rho: &DensityProfile, params: &ModelParams, grid: &VelocityGrid) -> Result<PhaseField> {
    PsiOperator::new(params, grid, rho.order()).forcing(rho)
}

pub fn psi_map(rho: &DensityProfile, params: &ModelParams, grid: &VelocityGrid) -> Result<DensityProfile> {
    PsiOperator::new(params, grid, rho.order()).apply(rho)
}

/// Rebuild the steady state `E + O` carried by a (fixed-point) density.
pub fn reconstruct_ness(rho: &DensityProfile, params: &ModelParams, grid: &VelocityGrid) -> Result<PhaseField> {
    let even = apply_resolvent(&forcing(rho, params, grid)?);
    let mut f = even.clone();
    let nodes = grid.nodes().to_vec();
    let o = rho.order() as i64;
    for k in -o..=o {
        let src = even.mode(k).to_vec();
        for ((dst, e), v) in f.mode_mut(k).iter_mut().zip(src).zip(&nodes) {
            *dst = e - e * Complex64::new(0.0, 2.0 * PI * k as f64 * v);
        }
    }
    Ok(f)
}

/// Largest entry of `v ∂ₓ f - F[ρ_f] + f` over all modes and nodes.
pub fn steady_state_residual(f: &PhaseField, params: &ModelParams) -> Result<f64> {
    let rho = f.velocity_moment(0);
    let forcing = forcing(&rho, params, f.grid())?;
    let nodes = f.grid().nodes();
    let o = f.order() as i64;
    let mut worst: f64 = 0.0;
    for k in -o..=o {
        for ((fv, fo), v) in f.mode(k).iter().zip(forcing.mode(k)).zip(nodes) {
            let r = fv * Complex64::new(1.0, 2.0 * PI * k as f64 * v) - fo;
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}

/// Sup-norm deviations of the pressure from `P∞` and of the momentum from zero.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConservationDiagnostics {
    pub pressure_deviation: f64,
    pub momentum_sup: f64,
}

pub fn conservation_diagnostics(f: &PhaseField, params: &ModelParams) -> ConservationDiagnostics {
    let n = fourier::collocation_points(f.order());
    let p = f.velocity_moment(2).sample(n);
    let m = f.velocity_moment(1).sample(n);
    ConservationDiagnostics {
        pressure_deviation: p.iter().map(|x| (x - params.p_inf()).abs()).fold(0.0, f64::max),
        momentum_sup: m.iter().map(|x| x.abs()).fold(0.0, f64::max),
    }
}

/// Outcome of a Picard iteration.
#[derive(Debug, Clone)]
pub struct FixedPointReport {
    /// `ρ_0, ρ_1, ...` in order.
    pub iterates: Vec<DensityProfile>,
    /// `‖ρ_{n+1} - ρ_n‖_{L²}`.
    pub residuals: Vec<f64>,
    /// `residuals[n+1] / residuals[n]`.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub final_density: DensityProfile,
    /// Number of map applications before the update fell below tolerance.
    pub iterations: usize,
}

impl FixedPointReport {
    /// Geometric mean of the last (up to) ten contraction ratios.
    pub fn trailing_ratio(&self) -> Option<f64> {
        let r: Vec<f64> = self
            .contraction_ratios
            .iter()
            .rev()
            .take(10)
            .copied()
            .filter(|x| *x > 0.0)
            .collect();
        if r.is_empty() {
            return None;
        }
        Some((r.iter().map(|x| x.ln()).sum::<f64>() / r.len() as f64).exp())
    }
}

/// Picard iteration `ρ_{n+1} = Ψ[ρ_n]` until `‖ρ_{n+1} - ρ_n‖ < tol`.
pub fn iterate_fixed_point(
    rho0: &DensityProfile,
    params: &ModelParams,
    grid: &VelocityGrid,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointReport> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "tolerance must be positive"));
    }
    let op = PsiOperator::new(params, grid, rho0.order());
    iterate_with(&op, rho0, tol, max_iter)
}

/// [`iterate_fixed_point`] reusing a prepared operator.
pub fn iterate_with(op: &PsiOperator, rho0: &DensityProfile, tol: f64, max_iter: usize) -> Result<FixedPointReport> {
    let mark = |n: usize| {
        move |e: Error| match e {
            Error::Domain { what, min, .. } => Error::Domain {
                what,
                min,
                iteration: Some(n),
            },
            other => other,
        }
    };
    let mut rho = rho0.with_order(op.order());
    op.positive_samples(&rho).map_err(mark(0))?;
    let mut report = FixedPointReport {
        iterates: alloc::vec![rho.clone()],
        residuals: Vec::new(),
        contraction_ratios: Vec::new(),
        converged: false,
        final_density: rho.clone(),
        iterations: 0,
    };
    for n in 0..max_iter {
        let next = op.apply(&rho).map_err(mark(n + 1))?;
        let r = next.l2_distance(&rho);
        if let Some(&prev) = report.residuals.last() {
            report.contraction_ratios.push(if prev > 0.0 { r / prev } else { 0.0 });
        }
        report.residuals.push(r);
        report.iterates.push(next.clone());
        rho = next;
        if r < tol {
            report.converged = true;
            report.iterations = n;
            break;
        }
        report.iterations = n + 1;
    }
    report.final_density = rho;
    Ok(report)
}

/// Power-iteration estimate of `‖DΨ[ρ̄]‖` on zero-mean perturbations.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContractionEstimate {
    pub norm: f64,
    /// Last relative change of the estimate.
    pub error_bar: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn contraction_norm_estimate(
    rho_bar: &DensityProfile,
    params: &ModelParams,
    grid: &VelocityGrid,
) -> Result<ContractionEstimate> {
    let op = PsiOperator::new(params, grid, rho_bar.order());
    let jac = op.jacobian_at(rho_bar)?;
    Ok(operator_norm(&jac.real_matrix(), 1e-10, 1000))
}

/// Largest singular value by power iteration on `JᵀJ`.
pub fn operator_norm(j: &nalgebra::DMatrix<f64>, rel_tol: f64, cap: usize) -> ContractionEstimate {
    let dim = j.ncols();
    if dim == 0 {
        return ContractionEstimate {
            norm: 0.0,
            error_bar: 0.0,
            iterations: 0,
            converged: true,
        };
    }
    let jtj = j.transpose() * j;
    // Deterministic start with weight on every direction.
    let mut x = nalgebra::DVector::from_fn(dim, |i, _| 1.0 + 0.01 * i as f64);
    x /= x.norm();
    let mut estimate = 0.0;
    let mut change = f64::INFINITY;
    for it in 1..=cap {
        let y = &jtj * &x;
        let ny = y.norm();
        if ny == 0.0 {
            return ContractionEstimate {
                norm: 0.0,
                error_bar: 0.0,
                iterations: it,
                converged: true,
            };
        }
        let next = ny.sqrt();
        change = (next - estimate).abs() / next;
        estimate = next;
        x = y / ny;
        if change < rel_tol {
            return ContractionEstimate {
                norm: (j * &x).norm(),
                error_bar: change,
                iterations: it,
                converged: true,
            };
        }
    }
    ContractionEstimate {
        norm: (j * &x).norm(),
        error_bar: change,
        iterations: cap,
        converged: false,
    }
}

/// Contraction estimates at `ρ̄ ≡ 1` along a list of couplings, and the
/// bracket where the estimate first reaches one (if it does).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaSweep {
    pub alphas: Vec<f64>,
    pub estimates: Vec<f64>,
    /// `(last α below one, first α at or above one)` refined by bisection.
    pub bracket: Option<(f64, f64)>,
}

pub fn contraction_alpha_sweep(
    template: &ModelParams,
    grid: &VelocityGrid,
    order: usize,
    alphas: &[f64],
) -> Result<AlphaSweep> {
    let one = DensityProfile::constant(order, 1.0);
    let estimate = |a: f64| -> Result<f64> {
        let p = template.with_alpha(a)?;
        Ok(contraction_norm_estimate(&one, &p, grid)?.norm)
    };
    let mut estimates = Vec::with_capacity(alphas.len());
    for &a in alphas {
        estimates.push(estimate(a)?);
    }
    let mut bracket = None;
    for i in 1..alphas.len() {
        if estimates[i - 1] < 1.0 && estimates[i] >= 1.0 {
            let (mut lo, mut hi) = (alphas[i - 1], alphas[i]);
            for _ in 0..30 {
                let mid = 0.5 * (lo + hi);
                if estimate(mid)? < 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            bracket = Some((lo, hi));
            break;
        }
    }
    Ok(AlphaSweep {
        alphas: alphas.to_vec(),
        estimates,
        bracket,
    })
}

/// Closed-form and quadrature values of the a-priori constants.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AprioriBounds {
    pub r: f64,
    /// Lower bound on steady densities from the fourth-moment argument.
    pub lower_moment: f64,
    /// Pointwise lower bound `r∞` on outputs of `Ψ`.
    pub lower_pointwise: f64,
    pub a_r: f64,
    pub b_r: f64,
    pub a_r_quadrature: f64,
    pub b_r_quadrature: f64,
    /// `δ_G = 1 - γ_1`.
    pub delta_g: f64,
    /// Sup over `k ≥ 1` of the Maxwellian-part multiplier at `ρ̄ ≡ 1`.
    pub maxwellian_part_norm: f64,
    /// `α · maxwellian_part_norm + (1 - α)(1 - δ_G)`.
    pub contraction_upper: f64,
    /// Bound on the spatial oscillation of the fourth moment.
    pub fourth_moment_oscillation: f64,
}

pub fn apriori_bounds(params: &ModelParams, r: f64) -> Result<AprioriBounds> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::param(
            "r",
            alloc::format!("exponent must lie in [0, 1), got {r}"),
        ));
    }
    let (alpha, p) = (params.alpha(), params.p_inf());
    let lower_moment = 1.0 / (3.0 * (2.0 - alpha) + (1.0 - alpha) / (6.0 * p));
    let band: f64 = [params.t1(), params.t2()]
        .iter()
        .map(|&t| libm::erf(2.0 / (2.0 * t).sqrt()) - libm::erf(1.0 / (2.0 * t).sqrt()))
        .sum::<f64>()
        * 0.5;
    let lower_pointwise = (1.0 - alpha) / (4.0 * E.sqrt()) * band;

    let gauss_weight = 2f64.powf((1.0 - r) / 2.0) * libm::tgamma((1.0 - r) / 2.0);
    let a_r = gauss_weight / (2.0 * PI * p.powf(r)).sqrt();
    let b_r = [params.t1(), params.t2()]
        .iter()
        .map(|&t| t.powf(-r / 2.0))
        .sum::<f64>()
        * 0.5
        * gauss_weight
        / (2.0 * PI).sqrt();
    let a_r_quadrature =
        2.0 * power_weighted_half_line(r, |w| (-w * w / 2.0).exp(), 1.0) / (2.0 * PI * p.powf(r)).sqrt();
    let b_r_quadrature = 2.0 * power_weighted_half_line(r, |v| reservoir_mix_at(params, v), params.t_min().sqrt());

    let gamma1 = resolvent_velocity_integral(1, params.t_max(), |v| reservoir_mix_at(params, v));
    let t = params.t_inf();
    let maxwellian_part_norm = (1..=64)
        .map(|k| {
            resolvent_velocity_integral(k, params.t_max(), |v| (1.5 - v * v / (2.0 * t)) * maxwellian_at(t, v)).abs()
        })
        .fold(0.0, f64::max);
    let delta_g = 1.0 - gamma1;
    Ok(AprioriBounds {
        r,
        lower_moment,
        lower_pointwise,
        a_r,
        b_r,
        a_r_quadrature,
        b_r_quadrature,
        delta_g,
        maxwellian_part_norm,
        contraction_upper: alpha * maxwellian_part_norm + (1.0 - alpha) * (1.0 - delta_g),
        fourth_moment_oscillation: (1.0 - alpha) * (params.t1() + params.t2()) / 12.0,
    })
}

/// `∫ f(v) / (1 + (2πkv)²) dv` for an even `f` decaying on the scale `√t_scale`,
/// with panels graded toward the peak of the symbol at `v = 0`.
pub fn resolvent_velocity_integral<F: Fn(f64) -> f64>(k: usize, t_scale: f64, f: F) -> f64 {
    let rule = Composite::new(16);
    let end = 12.0 * t_scale.sqrt();
    let mut breaks = alloc::vec![0.0];
    let mut b = if k == 0 {
        end
    } else {
        (1.0 / (2.0 * PI * k as f64)).min(end) / 16.0
    };
    while b < end {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(end);
    let s = resolvent_symbol(k as i64, 1.0);
    let c = 1.0 / s - 1.0;
    2.0 * rule.integrate_breaks(|v| f(v) / (1.0 + c * v * v), &breaks, 4)
}

/// Fourth-moment oscillation of a field against its bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FourthMomentCheck {
    pub mean: f64,
    pub deviation: f64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn verify_fourth_moment_relation(f: &PhaseField, params: &ModelParams) -> FourthMomentCheck {
    let fourth = f.velocity_moment(4);
    let mean = fourth.mean();
    let deviation = fourth
        .sample(fourier::collocation_points(f.order()))
        .iter()
        .map(|x| (x - mean).abs())
        .fold(0.0, f64::max);
    let bound = (1.0 - params.alpha()) * (params.t1() + params.t2()) / 12.0;
    FourthMomentCheck {
        mean,
        deviation,
        bound,
        satisfied: deviation <= bound + 1e-8,
    }
}

/// Norms of a density used when auditing the upper-bound argument.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityAudit {
    pub min: f64,
    pub sup: f64,
    pub l_7_4: f64,
}

pub fn density_audit(rho: &DensityProfile) -> DensityAudit {
    let s = rho.sample(fourier::collocation_points(rho.order()));
    let n = s.len() as f64;
    DensityAudit {
        min: s.iter().copied().fold(f64::INFINITY, f64::min),
        sup: s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        l_7_4: (s.iter().map(|x| x.abs().powf(1.75)).sum::<f64>() / n).powf(4.0 / 7.0),
    }
}
