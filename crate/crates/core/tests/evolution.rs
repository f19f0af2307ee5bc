mod common;

use std::f64::consts::PI;

use bgk_core::evolution::{
    fit_decay_rate, nonlinear_remainder, preset_field, run_decay_experiment, run_nonlinear, step_collision,
    step_linearized, step_transport, EvolutionConfig, GridLinearStepper, NonlinearStepper, Preset, Scheme,
};
use bgk_core::spectral::operator::linearized_collision;
use bgk_core::spectral::{build_basis, explicit_rate, FrequencyConvention, ModalField, SpectralBasis};
use bgk_core::{
    reservoir_mix, uniform_ness, weighted_norm, Complex64, DensityProfile, Error, ModelParams, PhaseField, VelocityGrid,
};
use common::{gaussian, params};

fn setup(alpha: f64, t1: f64, t2: f64, m: usize) -> (ModelParams, SpectralBasis) {
    let p = params(alpha, t1, t2);
    let b = build_basis(&p, &VelocityGrid::for_basis(&p, m), m).unwrap();
    (p, b)
}

/// `Re Σ_k ĥ_j(k) e^{2πikx}` at velocity node `j`.
fn evaluate(f: &PhaseField, x: f64, j: usize) -> f64 {
    let o = f.order() as i64;
    (-o..=o)
        .map(|k| (f.mode(k)[j] * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x)).re)
        .sum()
}

fn sample_field<F: Fn(f64, f64) -> f64>(order: usize, grid: &VelocityGrid, f: F) -> PhaseField {
    let nx = 4 * order + 2;
    let rows: Vec<Vec<f64>> = (0..nx)
        .map(|i| {
            let x = i as f64 / nx as f64;
            grid.nodes().iter().map(|&v| f(x, v)).collect()
        })
        .collect();
    PhaseField::from_samples(order, grid, &rows).unwrap()
}

fn f_inf_field(p: &ModelParams, order: usize, grid: &VelocityGrid) -> PhaseField {
    PhaseField::uniform(order, grid, &uniform_ness(p, grid)).unwrap()
}

#[test]
fn transport_examples() {
    let p = params(0.3, 1.0, 3.0);
    let grid = VelocityGrid::for_params(&p);
    // k = 0 slices and x-independent fields are untouched.
    let uniform = f_inf_field(&p, 3, &grid);
    assert_eq!(step_transport(&uniform, 0.7).max_abs_diff(&uniform).unwrap(), 0.0);
    let mut f = PhaseField::zeros(2, &grid);
    for k in -2i64..=2 {
        for (j, c) in f.mode_mut(k).iter_mut().enumerate() {
            *c = Complex64::new(1.0 + j as f64 * 1e-3, 0.1 * k as f64);
        }
    }
    let dt = 0.37;
    let g = step_transport(&f, dt);
    for k in -2i64..=2 {
        for (j, &v) in grid.nodes().iter().enumerate() {
            let expect = f.mode(k)[j] * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * v * dt);
            assert!((g.mode(k)[j] - expect).norm() < 1e-12);
        }
    }
    assert!((g.total_mass() - f.total_mass()).abs() < 1e-14);
    // Phase e^{-iπ} at v = 0.5, k = 1, dt = 1.
    let half = VelocityGrid::uniform(5, 1.0).unwrap();
    let j = half
        .nodes()
        .iter()
        .position(|v| (v - 0.5).abs() < 1e-15)
        .expect("node at 0.5");
    let mut one = PhaseField::zeros(1, &half);
    one.mode_mut(1)[j] = Complex64::new(1.0, 0.0);
    assert!((step_transport(&one, 1.0).mode(1)[j] + 1.0).norm() < 1e-14);
}

#[test]
fn collision_fixes_uniform_ness() {
    for &a in &[0.0, 0.4, 1.0] {
        let p = params(a, 1.0, 3.0);
        let grid = VelocityGrid::for_params(&p);
        let f = f_inf_field(&p, 4, &grid);
        let g = step_collision(&f, &p, 0.1).unwrap();
        assert!(g.max_abs_diff(&f).unwrap() < 1e-12, "alpha {a}");
    }
}

#[test]
fn collision_alpha_zero_example() {
    let p = params(0.0, 1.0, 3.0);
    let grid = VelocityGrid::for_params(&p);
    let t0 = 0.7;
    let profile: Vec<f64> = grid.nodes().iter().map(|&v| gaussian(t0, v)).collect();
    let rho = grid.integrate(&profile);
    let f = PhaseField::uniform(2, &grid, &profile).unwrap();
    let dt = 0.3;
    let g = step_collision(&f, &p, dt).unwrap();
    let mix = reservoir_mix(&p, &grid);
    let e = (-dt).exp();
    for (j, &v) in grid.nodes().iter().enumerate() {
        let expect = e * gaussian(t0, v) + (1.0 - e) * rho * 0.5 * (gaussian(1.0, v) + gaussian(3.0, v));
        assert!((g.mode(0)[j].re - expect).abs() < 1e-13);
        assert!((mix[j] - 0.5 * (gaussian(1.0, v) + gaussian(3.0, v))).abs() < 1e-15);
    }
    // Long relaxation approaches ρ G.
    let mut h = f;
    for _ in 0..60 {
        h = step_collision(&h, &p, 1.0).unwrap();
    }
    for (j, m) in mix.iter().enumerate() {
        assert!((h.mode(0)[j].re - rho * m).abs() < 1e-12);
    }
}

#[test]
fn collision_small_step_matches_rhs() {
    // f = ρ(x) ½(M_{θ₁(x)} + M_{θ₂(x)}): ρ_f = ρ, T_f = (θ₁ + θ₂)/2.
    let p = params(0.6, 1.0, 3.0);
    let grid = VelocityGrid::for_params(&p);
    let rho = |x: f64| 1.0 + 0.2 * (2.0 * PI * x).cos();
    let th1 = |x: f64| 1.2 + 0.3 * (2.0 * PI * x).sin();
    let th2 = |x: f64| 2.5 - 0.2 * (4.0 * PI * x).cos();
    let field = |x: f64, v: f64| rho(x) * 0.5 * (gaussian(th1(x), v) + gaussian(th2(x), v));
    let order = 12;
    let f = sample_field(order, &grid, field);
    let rhs = |x: f64, v: f64| {
        let t = 0.5 * (th1(x) + th2(x));
        let gain = p.alpha() * rho(x) * gaussian(t, v)
            + (1.0 - p.alpha()) * rho(x) * 0.5 * (gaussian(1.0, v) + gaussian(3.0, v));
        gain - field(x, v)
    };
    let err = |dt: f64| -> f64 {
        let g = step_collision(&f, &p, dt).unwrap();
        let mut worst: f64 = 0.0;
        for xi in 0..7 {
            let x = xi as f64 / 7.0 + 0.013;
            for (j, &v) in grid.nodes().iter().enumerate().step_by(5) {
                let fd = (evaluate(&g, x, j) - evaluate(&f, x, j)) / dt;
                worst = worst.max((fd - rhs(x, v)).abs());
            }
        }
        worst
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    assert!(e1 < 1e-2, "{e1}");
    let ratio = e1 / e2;
    assert!((1.7..2.3).contains(&ratio), "first-order ratio {ratio}");
}

#[test]
fn split_steps_keep_uniform_ness() {
    for scheme in [Scheme::Lie, Scheme::Strang] {
        let p = params(0.5, 1.0, 3.0);
        let grid = VelocityGrid::for_params(&p);
        let f = f_inf_field(&p, 4, &grid);
        for dt in [0.2, 0.1, 0.05] {
            let g = NonlinearStepper::new(&p, scheme, dt).step(&f).unwrap();
            // Each sub-flow fixes f∞ exactly, so the split residual sits at roundoff.
            assert!(g.max_abs_diff(&f).unwrap() < 1e-12);
        }
    }
}

#[test]
fn nonlinear_mass_conservation() {
    let p = params(0.3, 1.0, 3.0);
    let grid = VelocityGrid::for_params(&p);
    let f_inf = uniform_ness(&p, &grid);
    let rho = DensityProfile::from_trig(6, 0.0, &[(1, 0.05, 0.0), (2, 0.0, 0.02)]).unwrap();
    let h0 = PhaseField::tensor(&rho, &grid, &f_inf).unwrap();
    let config = EvolutionConfig {
        dt: 0.1,
        t_end: 5.0,
        linearized: false,
        record_every: 10,
        ..EvolutionConfig::default()
    };
    let run = run_nonlinear(&h0, &p, &config).unwrap();
    assert!(run.mass_drift <= 1e-12 * config.t_end, "{}", run.mass_drift);
    assert!(run.rows.iter().all(|r| r.rho_min > 0.0));
}

#[test]
fn linearized_collision_kills_equilibrium_perturbation() {
    // h = σ f∞ with τ = T∞σ exactly: ∫v² f∞ = T∞.
    let p = params(0.7, 1.0, 3.0);
    let grid = VelocityGrid::for_params(&p);
    let sigma = DensityProfile::from_trig(3, 0.0, &[(1, 0.4, 0.1), (3, 0.0, -0.2)]).unwrap();
    let h = PhaseField::tensor(&sigma, &grid, &uniform_ness(&p, &grid)).unwrap();
    let l = linearized_collision(&h, &p);
    assert!(weighted_norm(&l, &p, false) < 1e-10);
}

#[test]
fn zero_mode_relaxes_at_unit_rate() {
    let (p, b) = setup(0.4, 1.0, 3.0, 16);
    for m in [1, 3, 5] {
        let h = ModalField::basis_mode(2, 16, 0, m, 1.0).unwrap();
        let n0 = h.norm(false);
        for t in [0.5, 2.0, 7.0] {
            let ht = step_linearized(&h, &b, t, FrequencyConvention::TwoPi).unwrap();
            assert!((ht.norm(false) - (-t).exp() * n0).abs() < 1e-12, "m {m} t {t}");
        }
    }
    // ĥ₂(0) is fed back by the gain column and relaxes at 1 - α instead.
    let h = ModalField::basis_mode(2, 16, 0, 2, 1.0).unwrap();
    let ht = step_linearized(&h, &b, 2.0, FrequencyConvention::TwoPi).unwrap();
    assert!((ht.mode(0)[2].re - (-(1.0 - p.alpha()) * 2.0).exp()).abs() < 1e-12);
}

#[test]
fn linearized_step_preserves_zero_mass() {
    let (_, b) = setup(0.3, 1.0, 3.0, 16);
    let h0 = preset_field(
        Preset::RandomBandLimited {
            kmax: 3,
            seed: 5,
            amplitude: 1.0,
        },
        4,
        &b,
        16,
    )
    .unwrap();
    let h = ModalField::from_phase_field(&h0, &b).unwrap();
    let ht = step_linearized(&h, &b, 0.8, FrequencyConvention::TwoPi).unwrap();
    assert!(ht.global_mass().abs() < 1e-13);
    assert!(ht.to_phase_field(&b).unwrap().total_mass().abs() < 1e-12);
}

#[test]
fn zero_perturbation_stays_zero() {
    let (p, b) = setup(0.3, 1.0, 3.0, 16);
    let h0 = PhaseField::zeros(3, b.grid());
    for linearized in [true, false] {
        let config = EvolutionConfig {
            t_end: 2.0,
            dt: 0.1,
            basis_order: 16,
            linearized,
            ..EvolutionConfig::default()
        };
        let r = run_decay_experiment(&h0, &p, &b, &config).unwrap();
        // The nonlinear run steps f∞ itself, which is fixed up to roundoff.
        let floor = if linearized { 0.0 } else { 1e-13 };
        assert!(r.norms.iter().chain(&r.norms_h1).all(|n| *n <= floor));
        assert!(r.bound_satisfied);
    }
}

#[test]
fn g2_mode_decays_faster_than_explicit_rate() {
    let (p, b) = setup(0.0, 1.0, 3.0, 24);
    let rate = explicit_rate(&p);
    assert_eq!(rate.lambda, 0.125);
    let h0 = preset_field(
        Preset::BasisMode {
            k: 1,
            m: 2,
            amplitude: 1.0,
        },
        2,
        &b,
        24,
    )
    .unwrap();
    let r = run_decay_experiment(&h0, &p, &b, &EvolutionConfig::default()).unwrap();
    let fit = r.fit.unwrap();
    assert!(fit.rate >= 0.125 && fit.residual < 1e-2, "{fit:?}");
    assert!(r.bound_satisfied && r.rate_confirmed(1e-2));
    assert!(r.prefactor_check <= 4.0);
}

#[test]
fn lyapunov_functional_is_nonincreasing() {
    for &(a, t1, t2) in &[(0.0, 1.0, 3.0), (0.5, 0.5, 2.0), (0.9, 1.0, 1.0), (0.3, 0.05, 0.2)] {
        let (p, b) = setup(a, t1, t2, 16);
        for k in [1, 3] {
            let h0 = preset_field(
                Preset::BasisMode {
                    k,
                    m: 1,
                    amplitude: 1.0,
                },
                3,
                &b,
                16,
            )
            .unwrap();
            let config = EvolutionConfig {
                t_end: 6.0,
                basis_order: 16,
                ..EvolutionConfig::default()
            };
            let r = run_decay_experiment(&h0, &p, &b, &config).unwrap();
            assert_eq!(r.lyapunov_monotone, Some(true), "{a} {t1} {t2} k={k}");
        }
    }
}

#[test]
fn linearized_flow_matches_small_nonlinear_perturbations() {
    let (p, b) = setup(0.4, 1.0, 3.0, 16);
    let grid = b.grid().clone();
    let h0 = preset_field(
        Preset::BasisMode {
            k: 1,
            m: 2,
            amplitude: 1.0,
        },
        4,
        &b,
        16,
    )
    .unwrap();
    let base = f_inf_field(&p, 4, &grid);
    let dt = 0.05;
    let lin = GridLinearStepper::new(&p, &grid, Scheme::Strang);
    let nonlin = NonlinearStepper::new(&p, Scheme::Strang, dt);
    let gap = |eps: f64| -> f64 {
        let mut f = base.combine(1.0, &h0, eps).unwrap();
        let mut h = h0.clone();
        let mut worst: f64 = 0.0;
        for _ in 0..40 {
            f = nonlin.step(&f).unwrap();
            h = lin.step_by(&h, dt);
            let scaled = f.combine(1.0 / eps, &base, -1.0 / eps).unwrap();
            let d = scaled.combine(1.0, &h, -1.0).unwrap();
            worst = worst.max(weighted_norm(&d, &p, false) / weighted_norm(&h0, &p, false));
        }
        worst
    };
    let (g1, g2) = (gap(1e-2), gap(5e-3));
    assert!(g1 < 5e-2, "{g1}");
    let ratio = g1 / g2;
    assert!((1.7..2.3).contains(&ratio), "O(eps) ratio {ratio}");
}

#[test]
fn nonlinear_decay_to_uniform_ness() {
    let (p, b) = setup(0.3, 1.0, 3.0, 16);
    let grid = VelocityGrid::for_params(&p);
    let rho = DensityProfile::from_trig(8, 0.0, &[(1, 0.01, 0.0)]).unwrap();
    let h0 = PhaseField::tensor(&rho, &grid, &uniform_ness(&p, &grid)).unwrap();
    let config = EvolutionConfig {
        dt: 0.1,
        t_end: 40.0,
        linearized: false,
        record_every: 5,
        ..EvolutionConfig::default()
    };
    let r = run_decay_experiment(&h0, &p, &b, &config).unwrap();
    let last = *r.norms_h1.last().unwrap();
    assert!(last <= 1e-8, "{last}");
    let tail: Vec<f64> = r
        .times
        .iter()
        .zip(&r.norms_h1)
        .filter(|(t, _)| **t >= 5.0)
        .map(|(_, n)| *n)
        .collect();
    // Monotone after the initial transient, down to the roundoff floor.
    assert!(tail.windows(2).all(|w| w[0] < 1e-12 || w[1] <= w[0] * (1.0 + 1e-9)));
    let run = run_nonlinear(&h0, &p, &config).unwrap();
    let final_row = run.rows.last().unwrap();
    assert!(final_row.pressure_dev <= 1e-7 && final_row.momentum_sup <= 1e-7);
}

#[test]
fn remainder_properties() {
    let (p, b) = setup(0.5, 1.0, 3.0, 16);
    let grid = b.grid();
    let zero = PhaseField::zeros(4, grid);
    assert_eq!(weighted_norm(&nonlinear_remainder(&zero, &p).unwrap(), &p, true), 0.0);
    for seed in 0..4 {
        let h = preset_field(
            Preset::RandomBandLimited {
                kmax: 2,
                seed,
                amplitude: 0.02,
            },
            4,
            &b,
            8,
        )
        .unwrap();
        let r1 = weighted_norm(&nonlinear_remainder(&h, &p).unwrap(), &p, true);
        let r2 = weighted_norm(&nonlinear_remainder(&h.scaled(0.5), &p).unwrap(), &p, true);
        let ratio = r2 / r1;
        assert!((0.2..=0.3).contains(&ratio), "seed {seed}: {ratio}");
    }
    let big = PhaseField::tensor(
        &DensityProfile::from_trig(2, 0.0, &[(1, -1.5, 0.0)]).unwrap(),
        grid,
        &uniform_ness(&p, grid),
    )
    .unwrap();
    assert!(matches!(nonlinear_remainder(&big, &p), Err(Error::Domain { .. })));
}

#[test]
fn positivity_failure_reports_step() {
    let p = params(0.5, 1.0, 3.0);
    let grid = VelocityGrid::for_params(&p);
    let rho = DensityProfile::from_trig(2, 0.0, &[(1, -1.5, 0.0)]).unwrap();
    let h0 = PhaseField::tensor(&rho, &grid, &uniform_ness(&p, &grid)).unwrap();
    let config = EvolutionConfig {
        dt: 0.1,
        t_end: 1.0,
        linearized: false,
        ..EvolutionConfig::default()
    };
    match run_nonlinear(&h0, &p, &config) {
        Err(Error::Domain { iteration, .. }) => assert_eq!(iteration, Some(1)),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn config_validation() {
    let bad = [
        EvolutionConfig {
            dt: 0.0,
            ..EvolutionConfig::default()
        },
        EvolutionConfig {
            t_end: 0.01,
            dt: 0.1,
            ..EvolutionConfig::default()
        },
        EvolutionConfig {
            record_every: 0,
            ..EvolutionConfig::default()
        },
        EvolutionConfig {
            basis_order: 2,
            ..EvolutionConfig::default()
        },
    ];
    for c in bad {
        assert!(c.validate().is_err());
    }
    assert!(EvolutionConfig::default().validate().is_ok());
}

#[test]
fn rate_fit_on_exact_exponential() {
    let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.5).collect();
    let norms: Vec<f64> = times.iter().map(|t| 3.0 * (-0.37 * t).exp()).collect();
    let fit = fit_decay_rate(&times, &norms).unwrap();
    assert!((fit.rate - 0.37).abs() < 1e-12 && fit.residual < 1e-12);
    assert_eq!(fit.window, (10.0, 20.0));
    assert!(fit_decay_rate(&times[..2], &norms[..2]).is_none());
}
