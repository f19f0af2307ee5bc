//! Time integration of the nonlinear kinetic equation and of its linearization
//! around the uniform steady state, with norm tracking and decay-rate fits.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::corpus;
use crate::error::{Error, Result};
use crate::field::{weighted_norm_with, DensityProfile, PhaseField};
use crate::fourier;
use crate::linalg::{eigenvalues, expm, to_complex, CMatrix};
use crate::model::{maxwellian, maxwellian_at, reservoir_mix, uniform_ness, ModelParams, VelocityGrid};
use crate::ness::conservation_diagnostics;
use crate::spectral::blocks::{collision_matrix, streaming_matrix};
use crate::spectral::operator::{linearized_gain_mode, CollisionProfiles};
use crate::spectral::{explicit_rate, FrequencyConvention, ModalField, SpectralBasis};

/// Slack added to the prefactor bound `C e^{-λt} ‖h_0‖`.
pub const BOUND_SLACK: f64 = 1e-8;

/// Order of the operator splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scheme {
    /// Transport then collision.
    Lie,
    /// Half transport, collision, half transport.
    #[default]
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Record every `record_every`-th step (the initial and final states are always recorded).
    pub record_every: usize,
    pub linearized: bool,
    /// Number of basis functions per mode for the linearized flow.
    pub basis_order: usize,
    pub convention: FrequencyConvention,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            t_end: 20.0,
            scheme: Scheme::Strang,
            record_every: 1,
            linearized: true,
            basis_order: 24,
            convention: FrequencyConvention::TwoPi,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", "must be positive"));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::param("t_end", "must be at least dt"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be at least 1"));
        }
        if self.basis_order < 3 {
            return Err(Error::param("basis_order", "must be at least 3"));
        }
        Ok(())
    }

    /// Number of steps, with the last one shortened to land on `t_end`.
    fn steps(&self) -> (usize, f64) {
        let n = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_end - (n - 1) as f64 * self.dt)
    }
}

/// Free streaming over `dt`: mode `(k, v)` picks up the phase `e^{-2πikv dt}`.
pub fn step_transport(f: &PhaseField, dt: f64) -> PhaseField {
    let mut out = f.clone();
    transport_in_place(&mut out, dt);
    out
}

fn transport_in_place(f: &mut PhaseField, dt: f64) {
    let nodes = f.grid().nodes().to_vec();
    let o = f.order() as i64;
    for k in -o..=o {
        if k == 0 {
            continue;
        }
        let w = -2.0 * PI * k as f64 * dt;
        for (c, v) in f.mode_mut(k).iter_mut().zip(&nodes) {
            *c *= Complex64::from_polar(1.0, w * v);
        }
    }
}

/// Gain term `α M_f + (1-α) ρ_f G` evaluated in collocation, with `M_f = ρ_f M_{T_f}`
/// and `T_f = P_f / ρ_f` taken from the moments of `f`.
pub fn collision_gain(f: &PhaseField, params: &ModelParams) -> Result<PhaseField> {
    let order = f.order();
    let grid = f.grid();
    let n = fourier::collocation_points(order);
    let rho = f.velocity_moment(0).sample(n);
    let pressure = f.velocity_moment(2).sample(n);
    let rho_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    if !(rho_min > 0.0) {
        return Err(Error::Domain {
            what: "density",
            min: rho_min,
            iteration: None,
        });
    }
    let temp: Vec<f64> = pressure.iter().zip(&rho).map(|(p, r)| p / r).collect();
    let t_min = temp.iter().copied().fold(f64::INFINITY, f64::min);
    if !(t_min > 0.0) {
        return Err(Error::Domain {
            what: "temperature",
            min: t_min,
            iteration: None,
        });
    }
    let alpha = params.alpha();
    let mix = reservoir_mix(params, grid);
    let mut out = PhaseField::zeros(order, grid);
    let mut column = alloc::vec![0.0; n];
    for (j, v) in grid.nodes().iter().enumerate() {
        for i in 0..n {
            let local = if alpha > 0.0 {
                alpha * maxwellian_at(temp[i], *v)
            } else {
                0.0
            };
            column[i] = rho[i] * (local + (1.0 - alpha) * mix[j]);
        }
        out.set_column(j, &fourier::analyze_real(&column, order));
    }
    out.enforce_reality();
    Ok(out)
}

/// Relaxation over `dt` with the gain frozen at its sub-step-initial value.
pub fn step_collision(f: &PhaseField, params: &ModelParams, dt: f64) -> Result<PhaseField> {
    let gain = collision_gain(f, params)?;
    let decay = (-dt).exp();
    f.combine(decay, &gain, -(-dt).exp_m1())
}

/// Nonlinear split stepper with cached transport phases.
#[derive(Debug, Clone)]
pub struct NonlinearStepper {
    params: ModelParams,
    scheme: Scheme,
    dt: f64,
}

impl NonlinearStepper {
    pub fn new(params: &ModelParams, scheme: Scheme, dt: f64) -> Self {
        Self {
            params: *params,
            scheme,
            dt,
        }
    }

    pub fn step(&self, f: &PhaseField) -> Result<PhaseField> {
        self.step_by(f, self.dt)
    }

    pub fn step_by(&self, f: &PhaseField, dt: f64) -> Result<PhaseField> {
        match self.scheme {
            Scheme::Lie => step_collision(&step_transport(f, dt), &self.params, dt),
            Scheme::Strang => {
                let half = step_transport(f, 0.5 * dt);
                let mut g = step_collision(&half, &self.params, dt)?;
                transport_in_place(&mut g, 0.5 * dt);
                Ok(g)
            }
        }
    }
}

/// Same splitting applied to the linearized equation on the velocity grid:
/// exact transport and `h <- e^{-dt} h + (1 - e^{-dt}) (L_α h + h)`.
#[derive(Debug, Clone)]
pub struct GridLinearStepper {
    params: ModelParams,
    profiles: CollisionProfiles,
    weights: Vec<f64>,
    scheme: Scheme,
}

impl GridLinearStepper {
    pub fn new(params: &ModelParams, grid: &VelocityGrid, scheme: Scheme) -> Self {
        Self {
            params: *params,
            profiles: CollisionProfiles::new(params, grid),
            weights: grid.weights().to_vec(),
            scheme,
        }
    }

    fn collide(&self, h: &mut PhaseField, dt: f64) {
        let decay = (-dt).exp();
        let gain_w = -(-dt).exp_m1();
        let mut gain = alloc::vec![Complex64::new(0.0, 0.0); h.grid().len()];
        let o = h.order() as i64;
        for k in -o..=o {
            linearized_gain_mode(h.mode(k), &self.weights, &self.profiles, &self.params, &mut gain);
            for (c, g) in h.mode_mut(k).iter_mut().zip(&gain) {
                *c = *c * decay + g * gain_w;
            }
        }
    }

    pub fn step_by(&self, h: &PhaseField, dt: f64) -> PhaseField {
        match self.scheme {
            Scheme::Lie => {
                let mut g = step_transport(h, dt);
                self.collide(&mut g, dt);
                g
            }
            Scheme::Strang => {
                let mut g = step_transport(h, 0.5 * dt);
                self.collide(&mut g, dt);
                transport_in_place(&mut g, 0.5 * dt);
                g
            }
        }
    }
}

/// Generator `L - iκS` of mode `k` in the orthonormal basis.
pub fn mode_generator(k: i64, basis: &SpectralBasis, m: usize, convention: FrequencyConvention) -> CMatrix {
    let kappa = convention.kappa(k);
    to_complex(&collision_matrix(basis, m)) - to_complex(&streaming_matrix(basis, m)) * Complex64::new(0.0, kappa)
}

/// Exact per-mode propagators `exp((L - iκS) dt)` for a fixed step.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    order: usize,
    basis_order: usize,
    dt: f64,
    blocks: Vec<CMatrix>,
}

impl LinearPropagator {
    pub fn new(
        basis: &SpectralBasis,
        order: usize,
        m: usize,
        dt: f64,
        convention: FrequencyConvention,
    ) -> Result<Self> {
        if m < 3 || m > basis.order() {
            return Err(Error::Shape(alloc::format!(
                "truncation {m} outside 3..={}",
                basis.order()
            )));
        }
        let o = order as i64;
        let blocks = (-o..=o)
            .map(|k| expm(&(mode_generator(k, basis, m, convention) * Complex64::new(dt, 0.0))))
            .collect();
        Ok(Self {
            order,
            basis_order: m,
            dt,
            blocks,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, h: &ModalField) -> Result<ModalField> {
        if h.order() != self.order || h.basis_order() != self.basis_order {
            return Err(Error::Shape("modal field does not match the propagator".into()));
        }
        let mut out = ModalField::zeros(self.order, self.basis_order);
        let o = self.order as i64;
        for k in -o..=o {
            let b = &self.blocks[(k + o) as usize];
            let x = nalgebra::DVector::from_column_slice(h.mode(k));
            out.mode_mut(k).copy_from_slice((b * x).as_slice());
        }
        Ok(out)
    }
}

/// One linearized step of length `dt` (builds the propagator; reuse [`LinearPropagator`] for many).
pub fn step_linearized(
    h: &ModalField,
    basis: &SpectralBasis,
    dt: f64,
    convention: FrequencyConvention,
) -> Result<ModalField> {
    LinearPropagator::new(basis, h.order(), h.basis_order(), dt, convention)?.apply(h)
}

/// Least-squares fit of `log ‖h(t)‖ ≈ a - rate·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RateFit {
    pub rate: f64,
    /// Fraction of the variance of the log-norm left unexplained by the line, `1 - R²`.
    pub residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fit over `t ∈ [t_end/2, t_end]`; `None` if fewer than three positive samples fall in the window.
pub fn fit_decay_rate(times: &[f64], norms: &[f64]) -> Option<RateFit> {
    let t_end = *times.last()?;
    let lo = 0.5 * t_end;
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(norms)
        .filter(|(t, n)| **t >= lo && **n > 0.0)
        .map(|(t, n)| (*t, n.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let len = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sty / stt;
    let residual = if syy > 0.0 { 1.0 - sty * sty / (stt * syy) } else { 0.0 };
    Some(RateFit {
        rate: -slope,
        residual,
        window: (lo, t_end),
        points: pts.len(),
    })
}

/// Spectrum of one mode's truncated generator, attached when a bound fails.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeSpectrum {
    pub k: i64,
    /// Eigenvalues of `L - iκS` as `(re, im)` pairs.
    pub eigenvalues: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayReport {
    pub linearized: bool,
    pub times: Vec<f64>,
    /// `‖h(t)‖_{H_α}`.
    pub norms: Vec<f64>,
    /// `‖h(t)‖_{H¹_α}`.
    pub norms_h1: Vec<f64>,
    pub fit: Option<RateFit>,
    pub fit_h1: Option<RateFit>,
    pub theorem_rate: f64,
    pub prefactor: f64,
    /// `sup_t ‖h(t)‖ e^{λt} / ‖h_0‖`.
    pub prefactor_check: f64,
    pub prefactor_check_h1: f64,
    /// `‖h_t‖ <= C e^{-λt} ‖h_0‖ + 1e-8` in both norms at every recorded time.
    pub bound_satisfied: bool,
    /// `Σ_k ⟨ĥ(k), P_k ĥ(k)⟩` (linearized runs only).
    pub lyapunov: Option<Vec<f64>>,
    /// Same with weights `1 + (2πk)²`.
    pub lyapunov_h1: Option<Vec<f64>>,
    pub lyapunov_monotone: Option<bool>,
    /// Per-mode generator spectra, filled in when the bound fails on a linearized run.
    pub spectra: Vec<ModeSpectrum>,
}

impl DecayReport {
    /// Fitted rates at least `λ` with residuals below `max_residual`.
    pub fn rate_confirmed(&self, max_residual: f64) -> bool {
        [self.fit, self.fit_h1]
            .iter()
            .all(|f| f.is_some_and(|f| f.residual < max_residual && f.rate >= self.theorem_rate))
    }
}

/// Velocity grid on which linearized experiments run for a given basis size.
pub fn decay_grid(params: &ModelParams, config: &EvolutionConfig) -> VelocityGrid {
    VelocityGrid::for_basis(params, config.basis_order)
}

/// Evolve `h0` (a perturbation of `f∞`) and compare its decay with the explicit rate.
///
/// Linearized runs project `h0` onto the first `config.basis_order` basis
/// functions of `basis` and use exact per-mode exponentials; nonlinear runs
/// evolve `f∞ + h0` with the split scheme.
pub fn run_decay_experiment(
    h0: &PhaseField,
    params: &ModelParams,
    basis: &SpectralBasis,
    config: &EvolutionConfig,
) -> Result<DecayReport> {
    config.validate()?;
    if config.linearized {
        run_linearized(h0, params, basis, config)
    } else {
        Ok(nonlinear_report(&run_nonlinear(h0, params, config)?, params))
    }
}

/// Decay report for an already computed nonlinear run.
pub fn nonlinear_report(run: &NonlinearRun, params: &ModelParams) -> DecayReport {
    finish_report(
        false,
        run.times(),
        run.norms(),
        run.norms_h1(),
        params,
        None,
        None,
        Vec::new(),
    )
}

fn run_linearized(
    h0: &PhaseField,
    params: &ModelParams,
    basis: &SpectralBasis,
    config: &EvolutionConfig,
) -> Result<DecayReport> {
    let mass = h0.total_mass();
    if mass.abs() > 1e-10 * (1.0 + h0.data().iter().map(|c| c.norm()).fold(0.0, f64::max)) {
        return Err(Error::param("h0", alloc::format!("global mass {mass:e} is not zero")));
    }
    let m = config.basis_order;
    if m > basis.order() {
        return Err(Error::Shape(alloc::format!(
            "basis has {} functions, {m} requested",
            basis.order()
        )));
    }
    let mut h = ModalField::from_phase_field(h0, basis)?;
    if m < basis.order() {
        h = truncate(&h, m);
    }
    let order = h.order();
    let rate = explicit_rate(params);
    let lyap = LyapunovWeights::new(order, rate.c, config.convention);
    let (steps, last) = config.steps();
    let full = LinearPropagator::new(basis, order, m, config.dt, config.convention)?;
    let tail = if (last - config.dt).abs() > 1e-14 {
        Some(LinearPropagator::new(basis, order, m, last, config.convention)?)
    } else {
        None
    };

    let mut times = alloc::vec![0.0];
    let mut norms = alloc::vec![h.norm(false)];
    let mut norms_h1 = alloc::vec![h.norm(true)];
    let mut e = alloc::vec![lyap.value(&h, false)];
    let mut e1 = alloc::vec![lyap.value(&h, true)];
    let mut monotone = true;
    let (mut prev, mut prev1) = (e[0], e1[0]);
    for n in 1..=steps {
        let prop = if n == steps {
            tail.as_ref().unwrap_or(&full)
        } else {
            &full
        };
        h = prop.apply(&h)?;
        let (cur, cur1) = (lyap.value(&h, false), lyap.value(&h, true));
        monotone &= cur <= prev * (1.0 + 1e-12) + 1e-300 && cur1 <= prev1 * (1.0 + 1e-12) + 1e-300;
        (prev, prev1) = (cur, cur1);
        if n % config.record_every == 0 || n == steps {
            times.push(if n == steps { config.t_end } else { n as f64 * config.dt });
            norms.push(h.norm(false));
            norms_h1.push(h.norm(true));
            e.push(cur);
            e1.push(cur1);
        }
    }
    let mut report = finish_report(
        true,
        times,
        norms,
        norms_h1,
        params,
        Some((e, e1)),
        Some(monotone),
        Vec::new(),
    );
    if !report.bound_satisfied {
        let o = order as i64;
        for k in 0..=o {
            let ev = eigenvalues(&mode_generator(k, basis, m, config.convention))?;
            report.spectra.push(ModeSpectrum {
                k,
                eigenvalues: ev.iter().map(|z| (z.re, z.im)).collect(),
            });
        }
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    linearized: bool,
    times: Vec<f64>,
    norms: Vec<f64>,
    norms_h1: Vec<f64>,
    params: &ModelParams,
    lyapunov: Option<(Vec<f64>, Vec<f64>)>,
    monotone: Option<bool>,
    spectra: Vec<ModeSpectrum>,
) -> DecayReport {
    let rate = explicit_rate(params);
    let check = |ns: &[f64]| -> (f64, bool) {
        let n0 = ns[0];
        let mut sup: f64 = 0.0;
        let mut ok = true;
        for (t, n) in times.iter().zip(ns) {
            let env = (-rate.lambda * t).exp();
            ok &= *n <= rate.prefactor * env * n0 + BOUND_SLACK;
            if n0 > 0.0 {
                sup = sup.max(n / (env * n0));
            }
        }
        (sup, ok)
    };
    let (pc, ok) = check(&norms);
    let (pc1, ok1) = check(&norms_h1);
    let (lyapunov, lyapunov_h1) = match lyapunov {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    DecayReport {
        linearized,
        fit: fit_decay_rate(&times, &norms),
        fit_h1: fit_decay_rate(&times, &norms_h1),
        times,
        norms,
        norms_h1,
        theorem_rate: rate.lambda,
        prefactor: rate.prefactor,
        prefactor_check: pc,
        prefactor_check_h1: pc1,
        bound_satisfied: ok && ok1,
        lyapunov,
        lyapunov_h1,
        lyapunov_monotone: monotone,
        spectra,
    }
}

fn truncate(h: &ModalField, m: usize) -> ModalField {
    let mut out = ModalField::zeros(h.order(), m);
    let o = h.order() as i64;
    for k in -o..=o {
        out.mode_mut(k).copy_from_slice(&h.mode(k)[..m]);
    }
    out
}

// Per-mode weights of the modified entropy; only the (0, 1) corner differs from the identity.
struct LyapunovWeights {
    order: usize,
    corner: Vec<f64>,
}

impl LyapunovWeights {
    fn new(order: usize, c: f64, convention: FrequencyConvention) -> Self {
        let o = order as i64;
        let corner = (-o..=o)
            .map(|k| if k == 0 { 0.0 } else { c / convention.kappa(k) })
            .collect();
        Self { order, corner }
    }

    // ⟨h, P h⟩ with P = I, P[0,1] = -i c/κ, P[1,0] = i c/κ.
    fn value(&self, h: &ModalField, sobolev: bool) -> f64 {
        let o = self.order as i64;
        (-o..=o)
            .map(|k| {
                let x = h.mode(k);
                let w = if sobolev {
                    1.0 + (2.0 * PI * k as f64).powi(2)
                } else {
                    1.0
                };
                let s = self.corner[(k + o) as usize];
                let cross = (x[0].conj() * Complex64::new(0.0, -s) * x[1]).re * 2.0;
                w * (x.iter().map(|c| c.norm_sqr()).sum::<f64>() + cross)
            })
            .sum()
    }
}

/// One recorded state of a nonlinear run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeSeriesRow {
    pub t: f64,
    pub norm_h: f64,
    pub norm_h1: f64,
    pub rho_min: f64,
    pub pressure_dev: f64,
    pub momentum_sup: f64,
}

#[derive(Debug, Clone)]
pub struct NonlinearRun {
    pub rows: Vec<TimeSeriesRow>,
    pub final_state: PhaseField,
    /// Relative drift of the total mass over the run.
    pub mass_drift: f64,
}

impl NonlinearRun {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.norm_h).collect()
    }

    pub fn norms_h1(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.norm_h1).collect()
    }
}

/// Evolve `f∞ + h0` with the split scheme, recording distances to `f∞`.
///
/// A positivity failure is returned as a domain error whose `iteration` is the step index.
pub fn run_nonlinear(h0: &PhaseField, params: &ModelParams, config: &EvolutionConfig) -> Result<NonlinearRun> {
    config.validate()?;
    let grid = h0.grid();
    let f_inf = uniform_ness(params, grid);
    let base = PhaseField::uniform(h0.order(), grid, &f_inf)?;
    let mut f = base.combine(1.0, h0, 1.0)?;
    let mass0 = f.total_mass();
    let stepper = NonlinearStepper::new(params, config.scheme, config.dt);
    let (steps, last) = config.steps();
    let record = |t: f64, f: &PhaseField| -> Result<TimeSeriesRow> {
        let h = f.combine(1.0, &base, -1.0)?;
        let diag = conservation_diagnostics(f, params);
        Ok(TimeSeriesRow {
            t,
            norm_h: weighted_norm_with(&h, &f_inf, false)?,
            norm_h1: weighted_norm_with(&h, &f_inf, true)?,
            rho_min: f.velocity_moment(0).min_on_grid(fourier::collocation_points(f.order())),
            pressure_dev: diag.pressure_deviation,
            momentum_sup: diag.momentum_sup,
        })
    };
    let mut rows = alloc::vec![record(0.0, &f)?];
    for n in 1..=steps {
        let dt = if n == steps { last } else { config.dt };
        f = stepper.step_by(&f, dt).map_err(|e| match e {
            Error::Domain { what, min, .. } => Error::Domain {
                what,
                min,
                iteration: Some(n),
            },
            other => other,
        })?;
        if n % config.record_every == 0 || n == steps {
            let t = if n == steps { config.t_end } else { n as f64 * config.dt };
            rows.push(record(t, &f)?);
        }
    }
    let mass_drift = (f.total_mass() - mass0).abs() / mass0.abs().max(f64::MIN_POSITIVE);
    Ok(NonlinearRun {
        rows,
        final_state: f,
        mass_drift,
    })
}

/// `R[h] = M_f - M_{f∞} - [σ M_{T∞} + ½(v²/T∞ - 1)(τ/T∞ - σ) M_{T∞}]` with `f = f∞ + h`,
/// `σ = ∫h`, `τ = ∫v²h`, and `M_f = ρ_f M_{P_f/ρ_f}`.
pub fn nonlinear_remainder(h: &PhaseField, params: &ModelParams) -> Result<PhaseField> {
    let order = h.order();
    let grid = h.grid();
    let t_inf = params.t_inf();
    let n = fourier::collocation_points(order);
    let sigma = h.velocity_moment(0).sample(n);
    let tau = h.velocity_moment(2).sample(n);
    let rho: Vec<f64> = sigma.iter().map(|s| 1.0 + s).collect();
    let rho_min = rho.iter().copied().fold(f64::INFINITY, f64::min);
    if !(rho_min > 0.0) {
        return Err(Error::Domain {
            what: "density",
            min: rho_min,
            iteration: None,
        });
    }
    let temp: Vec<f64> = rho.iter().zip(&tau).map(|(r, t)| (t_inf + t) / r).collect();
    let t_min = temp.iter().copied().fold(f64::INFINITY, f64::min);
    if !(t_min > 0.0) {
        return Err(Error::Domain {
            what: "temperature",
            min: t_min,
            iteration: None,
        });
    }
    let m_inf = maxwellian(t_inf, grid)?;
    let mut out = PhaseField::zeros(order, grid);
    let mut column = alloc::vec![0.0; n];
    for (j, v) in grid.nodes().iter().enumerate() {
        let e = 0.5 * (v * v / t_inf - 1.0);
        for i in 0..n {
            let local = rho[i] * maxwellian_at(temp[i], *v);
            let linear = m_inf[j] * (sigma[i] + e * (tau[i] / t_inf - sigma[i]));
            column[i] = local - m_inf[j] - linear;
        }
        out.set_column(j, &fourier::analyze_real(&column, order));
    }
    out.enforce_reality();
    Ok(out)
}

/// Initial perturbations of `f∞` used by the decay experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Preset {
    /// `amplitude · g_m(v) cos(2πkx)`; `(k, m) = (0, 0)` is excluded (nonzero mass).
    BasisMode { k: usize, m: usize, amplitude: f64 },
    /// Random real coefficients on `1 <= |k| <= kmax`, all basis functions, decaying in `m`.
    RandomBandLimited { kmax: usize, seed: u64, amplitude: f64 },
    /// `amplitude · cos(2πkx) f∞(v)`.
    DensityOnly { k: usize, amplitude: f64 },
}

/// Build a preset as a phase field on the basis grid with spatial order `order`.
pub fn preset_field(preset: Preset, order: usize, basis: &SpectralBasis, basis_order: usize) -> Result<PhaseField> {
    let m = basis_order.min(basis.order());
    match preset {
        Preset::BasisMode { k, m: mm, amplitude } => {
            if k == 0 && mm == 0 {
                return Err(Error::param("preset", "g_0 at k = 0 carries global mass"));
            }
            ModalField::basis_mode(order, m, k, mm, amplitude)?.to_phase_field(basis)
        }
        Preset::RandomBandLimited { kmax, seed, amplitude } => {
            if kmax == 0 || kmax > order {
                return Err(Error::param("kmax", "must lie in 1..=order"));
            }
            let mut rng = corpus::rng(seed);
            let mut f = ModalField::zeros(order, m);
            for k in 1..=kmax as i64 {
                let c = corpus::random_complex(&mut rng, m);
                for (i, (dst, z)) in f.mode_mut(k).iter_mut().zip(c).enumerate() {
                    *dst = z * (0.7f64.powi(i as i32) / k as f64);
                }
                let conj: Vec<Complex64> = f.mode(k).iter().map(|z| z.conj()).collect();
                f.mode_mut(-k).copy_from_slice(&conj);
            }
            let norm = f.norm(false);
            f.scaled(amplitude / norm).to_phase_field(basis)
        }
        Preset::DensityOnly { k, amplitude } => {
            if k == 0 || k > order {
                return Err(Error::param("k", "must lie in 1..=order"));
            }
            let rho = DensityProfile::from_trig(order, 0.0, &[(k, amplitude, 0.0)])?;
            PhaseField::tensor(&rho, basis.grid(), basis.f_inf())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_basis;

    fn setup(alpha: f64) -> (ModelParams, SpectralBasis) {
        let p = ModelParams::new(alpha, 1.0, 3.0).unwrap();
        let b = build_basis(&p, &VelocityGrid::for_basis(&p, 16), 16).unwrap();
        (p, b)
    }

    #[test]
    fn transport_phase() {
        let g = VelocityGrid::uniform(9, 1.0).unwrap();
        let mut f = PhaseField::zeros(1, &g);
        f.mode_mut(1).iter_mut().for_each(|c| *c = Complex64::new(1.0, 0.0));
        let s = step_transport(&f, 1.0);
        let j = g.nodes().iter().position(|v| (v - 0.5).abs() < 1e-12).unwrap();
        assert!((s.mode(1)[j] - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert_eq!(s.mode(0), f.mode(0));
    }

    #[test]
    fn steady_state_is_fixed_by_collision() {
        let p = ModelParams::new(0.4, 1.0, 3.0).unwrap();
        let g = VelocityGrid::for_params(&p);
        let f = PhaseField::uniform(2, &g, &uniform_ness(&p, &g)).unwrap();
        let s = step_collision(&f, &p, 0.1).unwrap();
        assert!(s.max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn zero_mode_decays_at_unit_rate() {
        let (_, b) = setup(0.3);
        let h = ModalField::basis_mode(2, 16, 0, 3, 1.0).unwrap();
        let out = step_linearized(&h, &b, 1.5, FrequencyConvention::TwoPi).unwrap();
        assert!((out.norm(false) - (-1.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn density_with_matched_temperature_is_pure_streaming() {
        let (p, b) = setup(0.3);
        // τ = T∞σ for h = σ f∞, so L h = 0.
        let h = preset_field(Preset::DensityOnly { k: 1, amplitude: 0.5 }, 2, &b, 16).unwrap();
        let l = crate::spectral::operator::linearized_collision(&h, &p);
        assert!(l.data().iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn fit_recovers_exponential() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 * 0.2).collect();
        let n: Vec<f64> = t.iter().map(|t| 3.0 * (-0.4 * t).exp()).collect();
        let fit = fit_decay_rate(&t, &n).unwrap();
        assert!((fit.rate - 0.4).abs() < 1e-12 && fit.residual < 1e-12);
    }

    #[test]
    fn remainder_is_quadratic() {
        let p = ModelParams::new(0.5, 1.0, 3.0).unwrap();
        let g = VelocityGrid::for_params(&p);
        let rho = DensityProfile::from_trig(4, 0.0, &[(1, 0.02, 0.01)]).unwrap();
        let mut m2 = maxwellian(1.5, &g).unwrap();
        m2.iter_mut()
            .zip(maxwellian(2.0, &g).unwrap())
            .for_each(|(a, b)| *a -= b);
        let h = PhaseField::tensor(&rho, &g, &m2).unwrap();
        let r1 = weighted_norm(&nonlinear_remainder(&h, &p).unwrap(), &p, true);
        let r2 = weighted_norm(&nonlinear_remainder(&h.scaled(0.5), &p).unwrap(), &p, true);
        let ratio = r2 / r1;
        assert!((0.2..=0.3).contains(&ratio), "{ratio}");
        let z = nonlinear_remainder(&h.scaled(0.0), &p).unwrap();
        assert!(z.data().iter().all(|c| c.norm() < 1e-15));
    }

    use crate::field::weighted_norm;
}
