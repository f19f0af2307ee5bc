mod common;

use std::f64::consts::PI;

use bgk_core::field::weighted_norm_with;
use bgk_core::model::{homogeneous_residual, maxwellian_at, uniform_ness_at, uniform_ness_fourth_moment};
use bgk_core::{
    compute_moments, maxwellian, reservoir_mix, uniform_ness, weighted_norm, Complex64, DensityProfile, Error,
    ModelParams, PhaseField, VelocityGrid,
};
use common::{gaussian, gaussian_even_moment, params};
use proptest::prelude::*;

#[test]
fn params_derived_and_rejected() {
    let p = params(0.05, 1.0, 3.0);
    assert_eq!(p.t_inf(), 2.0);
    assert_eq!(p.p_inf(), 2.0);
    match ModelParams::new(1.5, 1.0, 3.0) {
        Err(Error::Parameter { name, .. }) => assert_eq!(name, "alpha"),
        other => panic!("{other:?}"),
    }
    assert!(ModelParams::new(0.5, 0.0, 3.0).is_err());
    assert!(ModelParams::new(0.5, 1.0, -1.0).is_err());
    assert!(ModelParams::new(f64::NAN, 1.0, 1.0).is_err());
}

#[test]
fn grid_is_symmetric_and_integrates_maxwellians() {
    let p = params(0.3, 0.5, 4.0);
    let g = VelocityGrid::for_params(&p);
    let n = g.len();
    for j in 0..n {
        assert_eq!(g.nodes()[j], -g.nodes()[n - 1 - j]);
        assert_eq!(g.weights()[j], g.weights()[n - 1 - j]);
        assert!(g.weights()[j] > 0.0);
    }
    for t in [p.t1(), p.t2(), p.t_inf()] {
        let m = maxwellian(t, &g).unwrap();
        assert!((g.integrate(&m) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn maxwellian_values_and_moments() {
    assert!((maxwellian_at(1.0, 0.0) - 0.398942).abs() < 1e-6);
    let p = params(0.0, 2.0, 2.0);
    let g = VelocityGrid::for_params(&p);
    let m = maxwellian(2.0, &g).unwrap();
    assert!((g.moment(&m, 2) - 2.0).abs() < 1e-8);
    assert!((g.moment(&m, 4) - gaussian_even_moment(2.0, 2)).abs() < 1e-8);
    assert!((gaussian_even_moment(2.0, 2) - 12.0).abs() < 1e-12);
    assert!(matches!(maxwellian(0.0, &g), Err(Error::Parameter { .. })));
    assert!(maxwellian(-1.0, &g).is_err());
}

#[test]
fn reservoir_mixture_moments() {
    let same = params(0.2, 1.7, 1.7);
    let g = VelocityGrid::for_params(&same);
    let mix = reservoir_mix(&same, &g);
    let m = maxwellian(1.7, &g).unwrap();
    assert!(mix.iter().zip(&m).all(|(a, b)| (a - b).abs() < 1e-15));

    let p = params(0.2, 1.0, 3.0);
    let g = VelocityGrid::for_params(&p);
    let mix = reservoir_mix(&p, &g);
    assert!((g.integrate(&mix) - 1.0).abs() < 1e-10);
    assert!((g.moment(&mix, 2) - 2.0).abs() < 1e-8);
    let oracle = 0.5 * (gaussian_even_moment(1.0, 2) + gaussian_even_moment(3.0, 2));
    assert!((oracle - 15.0).abs() < 1e-12);
    assert!((g.moment(&mix, 4) - oracle).abs() < 1e-8);
}

#[test]
fn uniform_ness_examples() {
    let p = params(1.0, 1.0, 3.0);
    let g = VelocityGrid::for_params(&p);
    let f = uniform_ness(&p, &g);
    let m = maxwellian(2.0, &g).unwrap();
    assert!(f.iter().zip(&m).all(|(a, b)| (a - b).abs() < 1e-15));

    let p = params(0.0, 1.0, 3.0);
    let direct = 0.5 * (gaussian(1.0, 0.0) + gaussian(3.0, 0.0));
    assert!((uniform_ness_at(&p, 0.0) - direct).abs() < 1e-15);
    assert!((direct - 0.314636).abs() < 1e-6);

    let p = params(0.5, 1.0, 3.0);
    let g = VelocityGrid::for_params(&p);
    let f = uniform_ness(&p, &g);
    assert!((g.moment(&f, 4) - 13.5).abs() < 1e-8);
    assert!((uniform_ness_fourth_moment(&p) - 13.5).abs() < 1e-12);
}

#[test]
fn ness_properties_over_a_sweep() {
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for (t1, t2) in [(0.2, 0.2), (0.5, 3.0), (1.0, 5.0)] {
            let p = params(alpha, t1, t2);
            let g = VelocityGrid::for_params(&p);
            let f = uniform_ness(&p, &g);
            let n = g.len();
            let mt = maxwellian(p.t_inf(), &g).unwrap();
            for j in 0..n {
                assert_eq!(f[j], f[n - 1 - j]);
                assert!(f[j] >= alpha * mt[j] - 1e-300);
            }
            assert!(homogeneous_residual(&f, &p, &g).unwrap() <= 1e-10);
            assert!((g.moment(&f, 2) - p.t_inf()).abs() < 1e-8);
        }
    }
}

#[test]
fn moments_of_uniform_and_odd_fields() {
    let p = params(0.4, 1.0, 3.0);
    let g = VelocityGrid::for_params(&p);
    let f = PhaseField::uniform(4, &g, &uniform_ness(&p, &g)).unwrap();
    let m = compute_moments(&f);
    for x in [0.0, 0.13, 0.5, 0.77] {
        assert!((m.rho.evaluate(x) - 1.0).abs() < 1e-12);
        assert!(m.momentum.evaluate(x).abs() < 1e-14);
        assert!((m.pressure.evaluate(x) - 2.0).abs() < 1e-10);
    }
    assert!((f.total_mass() - 1.0).abs() < 1e-10);

    // f + v M_1(v) cos(2πx): the momentum picks up ∫ v² M_1 = 1 times cos(2πx).
    let odd: Vec<f64> = g.nodes().iter().map(|v| v * gaussian(1.0, *v)).collect();
    let cos = DensityProfile::from_trig(4, 0.0, &[(1, 1.0, 0.0)]).unwrap();
    let pert = PhaseField::tensor(&cos, &g, &odd).unwrap();
    let total = f.combine(1.0, &pert, 1.0).unwrap();
    let m = compute_moments(&total);
    let second = common::integrate_line(&|v: f64| v * v * gaussian(1.0, v), 1.0);
    for x in [0.0, 0.1, 0.25, 0.6] {
        assert!((m.momentum.evaluate(x) - second * (2.0 * PI * x).cos()).abs() < 1e-10);
        assert!((m.rho.evaluate(x) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn weighted_norm_examples() {
    let p = params(0.3, 1.0, 3.0);
    let g = VelocityGrid::for_params(&p);
    let f = PhaseField::uniform(3, &g, &uniform_ness(&p, &g)).unwrap();
    assert!((weighted_norm(&f, &p, false) - 1.0).abs() < 1e-10);
    assert_eq!(weighted_norm(&PhaseField::zeros(3, &g), &p, true), 0.0);

    let p = params(1.0, 1.0, 3.0);
    let g = VelocityGrid::for_params(&p);
    let mut h = PhaseField::zeros(2, &g);
    let m = maxwellian(2.0, &g).unwrap();
    for k in [-1i64, 1] {
        for (c, v) in h.mode_mut(k).iter_mut().zip(&m) {
            *c = Complex64::new(*v, 0.0);
        }
    }
    let n2 = weighted_norm(&h, &p, true).powi(2);
    assert!((n2 - 2.0 * (1.0 + 4.0 * PI * PI)).abs() < 1e-8);

    let other = VelocityGrid::uniform(64, 10.0).unwrap();
    assert!(matches!(
        weighted_norm_with(&h, &uniform_ness(&p, &other), false),
        Err(Error::Shape(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sobolev_norm_dominates(seed in any::<u64>(), alpha in 0.0f64..=1.0) {
        let p = params(alpha, 1.0, 3.0);
        let g = VelocityGrid::uniform(128, 14.0).unwrap();
        let mut rng = bgk_core::corpus::rng(seed);
        let mut h = PhaseField::zeros(3, &g);
        for k in 0..=3i64 {
            let c = bgk_core::corpus::random_complex(&mut rng, g.len());
            h.mode_mut(k).copy_from_slice(&c);
            if k > 0 {
                let conj: Vec<Complex64> = c.iter().map(|z| z.conj()).collect();
                h.mode_mut(-k).copy_from_slice(&conj);
            }
        }
        prop_assert!(weighted_norm(&h, &p, false) <= weighted_norm(&h, &p, true));
    }

    #[test]
    fn fourth_moment_identity(alpha in 0.0f64..=1.0, t1 in 0.1f64..5.0, t2 in 0.1f64..5.0) {
        let p = params(alpha, t1, t2);
        let g = VelocityGrid::for_params(&p);
        let f = uniform_ness(&p, &g);
        let closed = 3.0 * (alpha * p.t_inf().powi(2) + (1.0 - alpha) * 0.5 * (t1 * t1 + t2 * t2));
        prop_assert!((g.moment(&f, 4) - closed).abs() < 1e-8 * closed.max(1.0));
    }
}
