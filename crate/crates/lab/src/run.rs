//! Command dispatch: each command runs one suite of core operations and
//! returns its artifacts and assertions.

use bgk_core::evolution::{
    nonlinear_report, preset_field, run_decay_experiment, run_nonlinear, EvolutionConfig, Preset,
};
use bgk_core::fourier::collocation_points;
use bgk_core::ness::{
    apriori_bounds, conservation_diagnostics, contraction_alpha_sweep, contraction_norm_estimate, density_audit,
    iterate_fixed_point, reconstruct_ness, verify_fourth_moment_relation, PsiOperator,
};
use bgk_core::spectral::dms::DmsOptions;
use bgk_core::spectral::{build_basis, dms_constants, explicit_rate, gap_table};
use bgk_core::{corpus, DensityProfile};
use serde::Serialize;

use crate::config::{Command, PresetKind, RunConfig};
use crate::error::{core_exit_code, LabError};
use crate::output::{cell, now_ms, write_outputs, Artifact, Assertion, RunManifest, Status};

/// Slack on certificate eigenvalues.
const CERTIFICATE_TOL: f64 = 1e-8;

/// Artifacts and checks produced by one command.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub assertions: Vec<Assertion>,
}

/// Failure inside a command: a core error is recorded in the manifest, anything
/// else aborts the run.
enum Failure {
    Core(bgk_core::Error),
    Lab(LabError),
}

impl From<bgk_core::Error> for Failure {
    fn from(e: bgk_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Core(c) => Failure::Core(c),
            other => Failure::Lab(other),
        }
    }
}

type CmdResult = Result<Outcome, Failure>;

/// Run the configured command, write its outputs and manifest, and return the manifest.
pub fn run(cfg: &RunConfig) -> Result<RunManifest, LabError> {
    let started_ms = now_ms();
    let result = match cfg.command {
        Command::Ness => ness(cfg),
        Command::Contraction => contraction(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Rates => rates(cfg),
        Command::Evolve => evolve(cfg),
        Command::VerifyBounds => verify_bounds(cfg),
        Command::Dms => dms(cfg),
    };
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(Failure::Core(e)) => (Outcome::default(), Some(e)),
        Err(Failure::Lab(e)) => return Err(e),
    };
    let (status, exit_code) = match &error {
        Some(e) => (Status::Error, core_exit_code(e)),
        None if outcome.assertions.iter().all(|a| a.passed) => (Status::Pass, 0),
        None => (Status::Fail, 1),
    };
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: cfg.command.to_string(),
        config: cfg.snapshot(),
        started_ms,
        finished_ms: now_ms(),
        status,
        exit_code,
        error: error.map(|e| e.to_string()),
        assertions: outcome.assertions,
        files: outcome
            .artifacts
            .iter()
            .map(|a| crate::output::FileEntry {
                name: a.name.clone(),
                bytes: a.bytes.len(),
                sha256: a.sha256(),
            })
            .collect(),
    };
    write_outputs(&cfg.output_dir, &outcome.artifacts, &manifest)?;
    Ok(manifest)
}

fn ness(cfg: &RunConfig) -> CmdResult {
    const ITERATION: &str = "picard-iteration-of-density-map";
    let p = &cfg.params;
    let grid = cfg.grid()?;
    let mut rng = corpus::rng(cfg.seed);
    let rho0 = corpus::random_density(&mut rng, cfg.order, cfg.order.div_ceil(2), cfg.rho_amplitude);
    let rep = iterate_fixed_point(&rho0, p, &grid, cfg.tol, cfg.max_iter)?;

    let rows: Vec<Vec<String>> = rep
        .residuals
        .iter()
        .enumerate()
        .map(|(n, r)| {
            let ratio = n.checked_sub(1).and_then(|i| rep.contraction_ratios.get(i).copied());
            vec![n.to_string(), cell(Some(*r)), cell(ratio), ITERATION.into()]
        })
        .collect();
    let iterations = Artifact::csv(
        "ness_iterations.csv",
        &["iteration", "residual", "contraction_ratio", "anchor"],
        &rows,
    )?;

    let rho = &rep.final_density;
    let n = collocation_points(rho.order());
    let xs = (0..n).map(|j| j as f64 / n as f64);
    let rows: Vec<Vec<String>> = xs
        .zip(rho.sample(n))
        .map(|(x, r)| vec![cell(Some(x)), cell(Some(r)), "steady-density".into()])
        .collect();
    let density = Artifact::csv("ness_density.csv", &["x", "rho", "anchor"], &rows)?;

    let bounds = apriori_bounds(p, 0.0)?;
    let f = reconstruct_ness(rho, p, &grid)?;
    #[derive(Serialize)]
    struct Report {
        converged: bool,
        iterations: usize,
        final_residual: Option<f64>,
        trailing_ratio: Option<f64>,
        distance_to_constant: f64,
        density: bgk_core::ness::DensityAudit,
        lower_moment_bound: f64,
        conservation: bgk_core::ness::ConservationDiagnostics,
        fourth_moment: bgk_core::ness::FourthMomentCheck,
    }
    let report = Report {
        converged: rep.converged,
        iterations: rep.iterations,
        final_residual: rep.residuals.last().copied(),
        trailing_ratio: rep.trailing_ratio(),
        distance_to_constant: rho.l2_distance(&DensityProfile::constant(rho.order(), 1.0)),
        density: density_audit(rho),
        lower_moment_bound: bounds.lower_moment,
        conservation: conservation_diagnostics(&f, p),
        fourth_moment: verify_fourth_moment_relation(&f, p),
    };
    let json = Artifact::json(
        "ness_report.json",
        &[
            ("converged", ITERATION),
            ("iterations", ITERATION),
            ("final_residual", ITERATION),
            ("trailing_ratio", "contraction-factor"),
            ("distance_to_constant", "uniqueness-of-steady-state"),
            ("density", "steady-density"),
            ("lower_moment_bound", "steady-density-lower-bound"),
            ("conservation", "pressure-and-momentum-conservation"),
            ("fourth_moment", "fourth-moment-oscillation-bound"),
        ],
        &report,
    )?;

    let mut assertions = vec![Assertion::new(
        "converged",
        report.converged,
        format!("{} iterations, tolerance {:e}", report.iterations, cfg.tol),
    )];
    if report.converged {
        let c = report.conservation;
        assertions.push(Assertion::new(
            "conservation",
            c.pressure_deviation <= 1e-7 && c.momentum_sup <= 1e-7,
            format!(
                "pressure deviation {:e}, momentum sup {:e} (<= 1e-7)",
                c.pressure_deviation, c.momentum_sup
            ),
        ));
        assertions.push(Assertion::new(
            "fourth_moment_bound",
            report.fourth_moment.satisfied,
            format!(
                "deviation {:e}, bound {:e}",
                report.fourth_moment.deviation, report.fourth_moment.bound
            ),
        ));
        assertions.push(Assertion::new(
            "density_lower_bound",
            report.density.min >= bounds.lower_moment - 1e-9,
            format!("min density {} >= {}", report.density.min, bounds.lower_moment),
        ));
    }
    Ok(Outcome {
        artifacts: vec![iterations, density, json],
        assertions,
    })
}

fn contraction(cfg: &RunConfig) -> CmdResult {
    const NORM: &str = "contraction-factor-of-density-map";
    let p = &cfg.params;
    let grid = cfg.grid()?;
    let one = DensityProfile::constant(cfg.order, 1.0);
    let estimate = contraction_norm_estimate(&one, p, &grid)?;
    let gamma_1 = PsiOperator::new(p, &grid, cfg.order).gamma(1);
    let alphas: Vec<f64> = (0..cfg.sweep_steps)
        .map(|i| i as f64 / (cfg.sweep_steps - 1) as f64)
        .collect();
    let sweep = contraction_alpha_sweep(p, &grid, cfg.order, &alphas)?;

    let rows: Vec<Vec<String>> = sweep
        .alphas
        .iter()
        .zip(&sweep.estimates)
        .map(|(a, e)| vec![cell(Some(*a)), cell(Some(*e)), NORM.into()])
        .collect();
    let csv = Artifact::csv("contraction_sweep.csv", &["alpha", "estimate", "anchor"], &rows)?;

    #[derive(Serialize)]
    struct Report {
        estimate: bgk_core::ness::ContractionEstimate,
        gamma_1: f64,
        /// Empirical bracket on the largest alpha with estimate below one.
        alpha_bracket: Option<(f64, f64)>,
    }
    let report = Report {
        estimate,
        gamma_1,
        alpha_bracket: sweep.bracket,
    };
    let json = Artifact::json(
        "contraction.json",
        &[
            ("estimate", NORM),
            ("gamma_1", "resolvent-multiplier-first-mode"),
            ("alpha_bracket", "empirical-contraction-loss-bracket"),
        ],
        &report,
    )?;
    let assertions = vec![Assertion::new(
        "power_iteration_converged",
        estimate.converged,
        format!(
            "norm {} after {} iterations (error bar {:e})",
            estimate.norm, estimate.iterations, estimate.error_bar
        ),
    )];
    Ok(Outcome {
        artifacts: vec![csv, json],
        assertions,
    })
}

fn spectrum(cfg: &RunConfig) -> CmdResult {
    let p = &cfg.params;
    let order = cfg.basis + 8;
    let basis = build_basis(p, &cfg.basis_grid(order)?, order)?;
    let table = gap_table(p, &basis, cfg.kmax, cfg.basis, cfg.convention)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|g| {
            vec![
                g.k.to_string(),
                g.m.to_string(),
                cell(Some(g.gap)),
                cell(g.gap_extended),
                g.stable.to_string(),
                cell(Some(g.lambda)),
                g.gap_exceeds_lambda().to_string(),
                cell(Some(g.certificate_min_eig)),
                "mode-spectral-gap-and-lyapunov-certificate".into(),
            ]
        })
        .collect();
    let csv = Artifact::csv(
        "spectrum.csv",
        &[
            "k",
            "m",
            "gap",
            "gap_extended",
            "stable",
            "lambda",
            "gap_ge_lambda",
            "certificate_min_eig",
            "anchor",
        ],
        &rows,
    )?;
    let min_gap = table.iter().map(|g| g.gap - g.lambda).fold(f64::INFINITY, f64::min);
    let min_cert = table
        .iter()
        .map(|g| g.certificate_min_eig)
        .fold(f64::INFINITY, f64::min);
    let assertions = vec![
        Assertion::new(
            "gap_ge_lambda",
            table.iter().all(|g| g.gap_exceeds_lambda()),
            format!("min(gap - lambda) = {min_gap:e} over k = 0..={}", cfg.kmax),
        ),
        Assertion::new(
            "certificate_psd",
            min_cert >= -CERTIFICATE_TOL,
            format!("min certificate eigenvalue {min_cert:e} >= -{CERTIFICATE_TOL:e}"),
        ),
    ];
    Ok(Outcome {
        artifacts: vec![csv],
        assertions,
    })
}

fn rates(cfg: &RunConfig) -> CmdResult {
    const RATE: &str = "explicit-hypocoercive-decay-rate";
    let r = explicit_rate(&cfg.params);
    let json = Artifact::json(
        "rates.json",
        &[
            ("prefactor", RATE),
            ("lambda", RATE),
            ("c", "lyapunov-mixing-parameter"),
            ("selector", "rate-case-selector"),
            ("case", "rate-case-selector"),
            ("proof_lambda", "rate-from-final-lyapunov-inequality"),
        ],
        &r,
    )?;
    let consistent = match r.case {
        bgk_core::spectral::RateCase::Collisional => r.selector < 0.5,
        bgk_core::spectral::RateCase::Transport => r.selector >= 0.5,
        bgk_core::spectral::RateCase::Degenerate => cfg.params.alpha() >= 1.0,
    };
    let assertions = vec![Assertion::new(
        "case_matches_selector",
        consistent,
        format!(
            "selector {} gives {:?}: C = {}, lambda = {}",
            r.selector, r.case, r.prefactor, r.lambda
        ),
    )];
    Ok(Outcome {
        artifacts: vec![json],
        assertions,
    })
}

fn evolve(cfg: &RunConfig) -> CmdResult {
    const DECAY: &str = "exponential-decay-estimate";
    let p = &cfg.params;
    let basis = build_basis(p, &cfg.basis_grid(cfg.basis)?, cfg.basis)?;
    let preset = match cfg.preset {
        PresetKind::BasisMode => Preset::BasisMode {
            k: cfg.preset_k,
            m: cfg.preset_m,
            amplitude: cfg.amplitude,
        },
        PresetKind::Random => Preset::RandomBandLimited {
            kmax: cfg.preset_k,
            seed: cfg.seed,
            amplitude: cfg.amplitude,
        },
        PresetKind::Density => Preset::DensityOnly {
            k: cfg.preset_k,
            amplitude: cfg.amplitude,
        },
    };
    let h0 = preset_field(preset, cfg.order, &basis, cfg.basis)?;
    let config = EvolutionConfig {
        dt: cfg.dt,
        t_end: cfg.t_end,
        scheme: cfg.scheme,
        record_every: cfg.record_every,
        linearized: cfg.linearized,
        basis_order: cfg.basis,
        convention: cfg.convention,
    };

    let (report, csv) = if cfg.linearized {
        let report = run_decay_experiment(&h0, p, &basis, &config)?;
        let lyap = report.lyapunov.clone().unwrap_or_default();
        let lyap_h1 = report.lyapunov_h1.clone().unwrap_or_default();
        let rows: Vec<Vec<String>> = (0..report.times.len())
            .map(|i| {
                vec![
                    cell(Some(report.times[i])),
                    cell(Some(report.norms[i])),
                    cell(Some(report.norms_h1[i])),
                    cell(lyap.get(i).copied()),
                    cell(lyap_h1.get(i).copied()),
                    DECAY.into(),
                ]
            })
            .collect();
        let csv = Artifact::csv(
            "evolve_timeseries.csv",
            &["t", "norm_H", "norm_H1", "lyapunov", "lyapunov_H1", "anchor"],
            &rows,
        )?;
        (report, csv)
    } else {
        let run = run_nonlinear(&h0, p, &config)?;
        let rows: Vec<Vec<String>> = run
            .rows
            .iter()
            .map(|r| {
                vec![
                    cell(Some(r.t)),
                    cell(Some(r.norm_h)),
                    cell(Some(r.norm_h1)),
                    cell(Some(r.rho_min)),
                    cell(Some(r.pressure_dev)),
                    cell(Some(r.momentum_sup)),
                    DECAY.into(),
                ]
            })
            .collect();
        let csv = Artifact::csv(
            "evolve_timeseries.csv",
            &[
                "t",
                "norm_H",
                "norm_H1",
                "rho_min",
                "pressure_dev",
                "momentum_sup",
                "anchor",
            ],
            &rows,
        )?;
        (nonlinear_report(&run, p), csv)
    };
    let json = Artifact::json(
        "evolve_report.json",
        &[
            ("times", DECAY),
            ("norms", DECAY),
            ("norms_h1", DECAY),
            ("fit", "fitted-decay-rate"),
            ("fit_h1", "fitted-decay-rate"),
            ("theorem_rate", "explicit-hypocoercive-decay-rate"),
            ("prefactor", "explicit-hypocoercive-decay-rate"),
            ("prefactor_check", DECAY),
            ("prefactor_check_h1", DECAY),
            ("bound_satisfied", DECAY),
            ("lyapunov", "lyapunov-functional"),
            ("lyapunov_h1", "lyapunov-functional"),
            ("lyapunov_monotone", "lyapunov-functional"),
            ("linearized", DECAY),
            ("spectra", "mode-generator-spectrum"),
        ],
        &report,
    )?;

    let mut assertions = vec![Assertion::new(
        "decay_bound",
        report.bound_satisfied,
        format!(
            "sup ||h_t|| e^(lambda t)/||h_0|| = {} (H), {} (H1) vs C = {}",
            report.prefactor_check, report.prefactor_check_h1, report.prefactor
        ),
    )];
    for (name, fit) in [("fitted_rate_H", report.fit), ("fitted_rate_H1", report.fit_h1)] {
        assertions.push(match fit {
            Some(f) => Assertion::new(
                name,
                f.rate >= report.theorem_rate,
                format!(
                    "rate {} >= lambda {} (1 - R^2 = {:e})",
                    f.rate, report.theorem_rate, f.residual
                ),
            ),
            None => Assertion::new(name, false, "too few positive samples in the fit window"),
        });
    }
    if let Some(m) = report.lyapunov_monotone {
        assertions.push(Assertion::new(
            "lyapunov_nonincreasing",
            m,
            "Lyapunov functional along the run",
        ));
    }
    Ok(Outcome {
        artifacts: vec![csv, json],
        assertions,
    })
}

fn verify_bounds(cfg: &RunConfig) -> CmdResult {
    let b = apriori_bounds(&cfg.params, cfg.r)?;
    let json = Artifact::json(
        "bounds.json",
        &[
            ("r", "smoothing-exponent"),
            ("lower_moment", "steady-density-lower-bound"),
            ("lower_pointwise", "pointwise-lower-bound-of-density-map"),
            ("a_r", "smoothing-constant-a"),
            ("b_r", "smoothing-constant-b"),
            ("a_r_quadrature", "smoothing-constant-a"),
            ("b_r_quadrature", "smoothing-constant-b"),
            ("delta_g", "resolvent-gap"),
            ("maxwellian_part_norm", "contraction-factor-of-density-map"),
            ("contraction_upper", "contraction-factor-of-density-map"),
            ("fourth_moment_oscillation", "fourth-moment-oscillation-bound"),
        ],
        &b,
    )?;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-6 * x.abs().max(1.0);
    let assertions = vec![
        Assertion::new(
            "lower_bounds_admissible",
            b.lower_moment > 0.0 && b.lower_moment <= 1.0 && b.lower_pointwise > 0.0,
            format!("lower_moment {}, lower_pointwise {}", b.lower_moment, b.lower_pointwise),
        ),
        Assertion::new(
            "closed_forms_match_quadrature",
            close(b.a_r, b.a_r_quadrature) && close(b.b_r, b.b_r_quadrature),
            format!(
                "A_r {} vs {}, B_r {} vs {}",
                b.a_r, b.a_r_quadrature, b.b_r, b.b_r_quadrature
            ),
        ),
    ];
    Ok(Outcome {
        artifacts: vec![json],
        assertions,
    })
}

fn dms(cfg: &RunConfig) -> CmdResult {
    let p = &cfg.params;
    let basis = build_basis(p, &cfg.basis_grid(cfg.basis)?, cfg.basis)?;
    let options = DmsOptions {
        samples: cfg.samples,
        seed: cfg.seed,
        order: cfg.order,
        check_modes: cfg.check_modes,
    };
    let d = dms_constants(p, &basis, &options)?;
    let json = Artifact::json(
        "dms.json",
        &[
            ("lambda_m", "microscopic-coercivity"),
            ("lambda_m_measured", "microscopic-coercivity"),
            ("lambda_macro", "macroscopic-coercivity"),
            ("macro_ratio_min", "macroscopic-coercivity"),
            ("c_m_measured", "auxiliary-operator-bound"),
            ("c_m_bound", "auxiliary-operator-bound"),
            ("c_m", "auxiliary-operator-bound"),
            ("epsilon", "abstract-hypocoercivity-constants"),
            ("delta", "abstract-hypocoercivity-constants"),
            ("kappa", "abstract-hypocoercivity-constants"),
            ("lambda", "abstract-hypocoercivity-constants"),
            ("prefactor", "abstract-hypocoercivity-constants"),
            ("aux_ratio_max", "explicit-auxiliary-bounds"),
            ("streaming_aux_ratio_max", "explicit-auxiliary-bounds"),
            ("explicit_bound_violation", "explicit-auxiliary-bounds"),
            ("entropy_certificate_min_eig", "modified-entropy-certificate"),
            ("samples", "abstract-hypocoercivity-constants"),
        ],
        &d,
    )?;
    let assertions = vec![
        Assertion::new(
            "auxiliary_bounds",
            d.explicit_bound_violation <= 1e-9,
            format!(
                "largest violation {:e} <= 1e-9 over {} samples",
                d.explicit_bound_violation, d.samples
            ),
        ),
        Assertion::new(
            "macroscopic_coercivity",
            d.macro_ratio_min >= 1.0,
            format!("min ratio {} >= 1", d.macro_ratio_min),
        ),
        Assertion::new(
            "positive_rate",
            d.lambda > 0.0,
            format!("lambda {:e}, C {}", d.lambda, d.prefactor),
        ),
        Assertion::new(
            "entropy_certificate",
            d.entropy_certificate_min_eig >= -CERTIFICATE_TOL,
            format!(
                "min eigenvalue {:e} >= -{CERTIFICATE_TOL:e}",
                d.entropy_certificate_min_eig
            ),
        ),
    ];
    Ok(Outcome {
        artifacts: vec![json],
        assertions,
    })
}
