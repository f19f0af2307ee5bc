//! Run configuration: a flat `key = value` file merged with command-line flags.
//!
//! Every key can appear in the file or as `--key value` (underscores become
//! hyphens on the command line). Flags override file values; unknown keys are
//! errors.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bgk_core::evolution::Scheme;
use bgk_core::spectral::FrequencyConvention;
use bgk_core::{ModelParams, VelocityGrid};
use serde::Serialize;

use crate::error::LabError;

/// Environment variable holding the default output directory.
pub const OUTPUT_DIR_ENV: &str = "BGK_LAB_OUTPUT_DIR";
/// Output directory when neither the key nor the environment variable is set.
pub const DEFAULT_OUTPUT_DIR: &str = "bgk-lab-output";

/// Configuration keys with their help text.
pub const KEYS: &[(&str, &str)] = &[
    ("alpha", "mixing parameter in [0, 1] (required)"),
    ("t1", "temperature of the first reservoir, > 0 (required)"),
    ("t2", "temperature of the second reservoir, > 0 (required)"),
    ("order", "spatial Fourier truncation K [default 8]"),
    ("basis", "velocity basis size M [default 24]"),
    (
        "velocity_nodes",
        "number of velocity nodes [default: chosen from the temperatures]",
    ),
    ("cutoff", "velocity cutoff [default: 8 sqrt(max(t1, t2))]"),
    ("tol", "fixed-point tolerance [default 1e-12]"),
    ("max_iter", "fixed-point iteration cap [default 10000]"),
    ("seed", "seed for randomized corpora [default 0]"),
    (
        "rho_amplitude",
        "amplitude of the random initial density for `ness` [default 0.5]",
    ),
    (
        "sweep_steps",
        "number of alpha values in the contraction sweep [default 11]",
    ),
    ("kmax", "largest Fourier mode in `spectrum` [default 32]"),
    ("convention", "frequency convention: two-pi or unit [default two-pi]"),
    (
        "r",
        "exponent of the smoothing constants in `verify-bounds`, in [0, 1) [default 0]",
    ),
    ("samples", "corpus size for `dms` [default 2000]"),
    (
        "check_modes",
        "modes checked by the entropy certificate in `dms` [default 32]",
    ),
    ("dt", "time step for `evolve` [default 0.05]"),
    ("t_end", "final time for `evolve` [default 20]"),
    ("scheme", "splitting scheme: lie or strang [default strang]"),
    (
        "linearized",
        "evolve the linearized equation: true or false [default true]",
    ),
    ("record_every", "record every n-th step [default 1]"),
    (
        "preset",
        "initial perturbation: basis-mode, random or density [default basis-mode]",
    ),
    (
        "preset_k",
        "Fourier mode of the preset (band limit for random) [default 1]",
    ),
    ("preset_m", "basis index of the basis-mode preset [default 2]"),
    ("amplitude", "amplitude of the preset [default 0.01]"),
    (
        "output_dir",
        "output directory [default: $BGK_LAB_OUTPUT_DIR, else bgk-lab-output]",
    ),
];

/// Experiment selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ness,
    Contraction,
    Spectrum,
    Rates,
    Evolve,
    VerifyBounds,
    Dms,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Ness,
        Command::Contraction,
        Command::Spectrum,
        Command::Rates,
        Command::Evolve,
        Command::VerifyBounds,
        Command::Dms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Ness => "ness",
            Command::Contraction => "contraction",
            Command::Spectrum => "spectrum",
            Command::Rates => "rates",
            Command::Evolve => "evolve",
            Command::VerifyBounds => "verify-bounds",
            Command::Dms => "dms",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Command::Ness => "Solve for a steady density by Picard iteration and audit it",
            Command::Contraction => "Estimate the contraction factor of the density map and sweep alpha",
            Command::Spectrum => "Per-mode spectral gaps and Lyapunov certificates",
            Command::Rates => "Explicit decay rate and prefactor",
            Command::Evolve => "Time-integrate a perturbation and fit its decay rate",
            Command::VerifyBounds => "A-priori density bounds and constants",
            Command::Dms => "Constants of the abstract hypocoercivity scheme",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Initial perturbation used by `evolve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetKind {
    BasisMode,
    Random,
    Density,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub order: usize,
    pub basis: usize,
    pub velocity_nodes: Option<usize>,
    pub cutoff: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub rho_amplitude: f64,
    pub sweep_steps: usize,
    pub kmax: i64,
    pub convention: FrequencyConvention,
    pub r: f64,
    pub samples: usize,
    pub check_modes: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub linearized: bool,
    pub record_every: usize,
    pub preset: PresetKind,
    pub preset_k: usize,
    pub preset_m: usize,
    pub amplitude: f64,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// `T∞ = (t1 + t2) / 2`.
    pub fn t_inf(&self) -> f64 {
        self.params.t_inf()
    }

    /// Velocity grid for the fixed-point commands, honoring explicit overrides.
    pub fn grid(&self) -> Result<VelocityGrid, LabError> {
        self.grid_or(VelocityGrid::for_params(&self.params))
    }

    /// Velocity grid wide enough for a basis of `order` functions.
    pub fn basis_grid(&self, order: usize) -> Result<VelocityGrid, LabError> {
        self.grid_or(VelocityGrid::for_basis(&self.params, order))
    }

    fn grid_or(&self, default: VelocityGrid) -> Result<VelocityGrid, LabError> {
        if self.velocity_nodes.is_none() && self.cutoff.is_none() {
            return Ok(default);
        }
        let n = self.velocity_nodes.unwrap_or(default.len());
        let cutoff = self.cutoff.unwrap_or(default.cutoff());
        Ok(VelocityGrid::uniform(n, cutoff)?)
    }

    /// Resolved values of every key, plus the derived `t_inf`.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        let entries = [
            ("command", self.command.to_string()),
            ("alpha", self.params.alpha().to_string()),
            ("t1", self.params.t1().to_string()),
            ("t2", self.params.t2().to_string()),
            ("t_inf", self.t_inf().to_string()),
            ("order", self.order.to_string()),
            ("basis", self.basis.to_string()),
            ("velocity_nodes", opt(self.velocity_nodes.map(|n| n.to_string()))),
            ("cutoff", opt(self.cutoff.map(|c| c.to_string()))),
            ("tol", format!("{:e}", self.tol)),
            ("max_iter", self.max_iter.to_string()),
            ("seed", self.seed.to_string()),
            ("rho_amplitude", self.rho_amplitude.to_string()),
            ("sweep_steps", self.sweep_steps.to_string()),
            ("kmax", self.kmax.to_string()),
            ("convention", self.convention.name().to_string()),
            ("r", self.r.to_string()),
            ("samples", self.samples.to_string()),
            ("check_modes", self.check_modes.to_string()),
            ("dt", self.dt.to_string()),
            ("t_end", self.t_end.to_string()),
            ("scheme", scheme_name(self.scheme).to_string()),
            ("linearized", self.linearized.to_string()),
            ("record_every", self.record_every.to_string()),
            ("preset", preset_name(self.preset).to_string()),
            ("preset_k", self.preset_k.to_string()),
            ("preset_m", self.preset_m.to_string()),
            ("amplitude", self.amplitude.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
        ];
        entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::Lie => "lie",
        Scheme::Strang => "strang",
    }
}

fn preset_name(p: PresetKind) -> &'static str {
    match p {
        PresetKind::BasisMode => "basis-mode",
        PresetKind::Random => "random",
        PresetKind::Density => "density",
    }
}

/// Parse a flat config file: `key = value` per line, `#` starts a comment.
pub fn parse_config_text(text: &str, path: &Path) -> Result<BTreeMap<String, String>, LabError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |reason: &str| LabError::Syntax {
            path: path.to_path_buf(),
            line: i + 1,
            reason: reason.to_string(),
        };
        let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(syntax("empty key"));
        }
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(LabError::UnknownKey(key.to_string()));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(syntax(&format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

/// Read and parse a config file.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(format!("reading {}", path.display()), e))?;
    parse_config_text(&text, path)
}

/// Merge file values with flags (flags win) and validate the result.
///
/// `env_output_dir` is the value of [`OUTPUT_DIR_ENV`], if set.
pub fn parse_config(
    command: Command,
    file: Option<&Path>,
    flags: &BTreeMap<String, String>,
    env_output_dir: Option<&str>,
) -> Result<RunConfig, LabError> {
    let mut values = match file {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    for (k, v) in flags {
        if !KEYS.iter().any(|(key, _)| key == k) {
            return Err(LabError::UnknownKey(k.clone()));
        }
        values.insert(k.clone(), v.clone());
    }
    Values(&values).build(command, env_output_dir)
}

struct Values<'a>(&'a BTreeMap<String, String>);

impl Values<'_> {
    fn raw(&self, key: &'static str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &'static str) -> Result<Option<T>, LabError>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|e| LabError::value(key, format!("cannot parse `{s}`: {e}")))
            })
            .transpose()
    }

    fn required<T: FromStr>(&self, key: &'static str) -> Result<T, LabError>
    where
        T::Err: fmt::Display,
    {
        self.parsed(key)?.ok_or(LabError::MissingKey(key))
    }

    fn or<T: FromStr>(&self, key: &'static str, default: T) -> Result<T, LabError>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn build(&self, command: Command, env_output_dir: Option<&str>) -> Result<RunConfig, LabError> {
        let alpha: f64 = self.required("alpha")?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(LabError::value("alpha", format!("must lie in [0, 1], got {alpha}")));
        }
        let t1: f64 = positive("t1", self.required("t1")?)?;
        let t2: f64 = positive("t2", self.required("t2")?)?;
        let params = ModelParams::new(alpha, t1, t2)?;

        let convention = match self.raw("convention").unwrap_or("two-pi") {
            "two-pi" => FrequencyConvention::TwoPi,
            "unit" => FrequencyConvention::Unit,
            other => {
                return Err(LabError::value(
                    "convention",
                    format!("expected two-pi or unit, got `{other}`"),
                ))
            }
        };
        let scheme = match self.raw("scheme").unwrap_or("strang") {
            "strang" => Scheme::Strang,
            "lie" => Scheme::Lie,
            other => {
                return Err(LabError::value(
                    "scheme",
                    format!("expected lie or strang, got `{other}`"),
                ))
            }
        };
        let preset = match self.raw("preset").unwrap_or("basis-mode") {
            "basis-mode" => PresetKind::BasisMode,
            "random" => PresetKind::Random,
            "density" => PresetKind::Density,
            other => {
                return Err(LabError::value(
                    "preset",
                    format!("expected basis-mode, random or density, got `{other}`"),
                ))
            }
        };
        let output_dir = match (self.raw("output_dir"), env_output_dir) {
            (Some(d), _) | (None, Some(d)) if !d.is_empty() => PathBuf::from(d),
            _ => PathBuf::from(DEFAULT_OUTPUT_DIR),
        };

        let r = self.or("r", 0.0)?;
        if !(0.0..1.0).contains(&r) {
            return Err(LabError::value("r", format!("must lie in [0, 1), got {r}")));
        }
        let kmax: i64 = self.or("kmax", 32)?;
        if kmax < 0 {
            return Err(LabError::value("kmax", format!("must be non-negative, got {kmax}")));
        }
        let dt = positive("dt", self.or("dt", 0.05)?)?;
        let t_end = positive("t_end", self.or("t_end", 20.0)?)?;
        if t_end < dt {
            return Err(LabError::value(
                "t_end",
                format!("must be at least dt = {dt}, got {t_end}"),
            ));
        }

        Ok(RunConfig {
            command,
            params,
            order: at_least("order", self.or("order", 8)?, 1)?,
            basis: at_least("basis", self.or("basis", 24)?, 3)?,
            velocity_nodes: self
                .parsed::<usize>("velocity_nodes")?
                .map(|n| at_least("velocity_nodes", n, 4))
                .transpose()?,
            cutoff: self
                .parsed::<f64>("cutoff")?
                .map(|c| positive("cutoff", c))
                .transpose()?,
            tol: positive("tol", self.or("tol", 1e-12)?)?,
            max_iter: at_least("max_iter", self.or("max_iter", 10_000)?, 1)?,
            seed: self.or("seed", 0)?,
            rho_amplitude: {
                let a: f64 = self.or("rho_amplitude", 0.5)?;
                if !(0.0..1.0).contains(&a) {
                    return Err(LabError::value("rho_amplitude", format!("must lie in [0, 1), got {a}")));
                }
                a
            },
            sweep_steps: at_least("sweep_steps", self.or("sweep_steps", 11)?, 2)?,
            kmax,
            convention,
            r,
            samples: at_least("samples", self.or("samples", 2000)?, 1)?,
            check_modes: self.or("check_modes", 32)?,
            dt,
            t_end,
            scheme,
            linearized: self.or("linearized", true)?,
            record_every: at_least("record_every", self.or("record_every", 1)?, 1)?,
            preset,
            preset_k: self.or("preset_k", 1)?,
            preset_m: self.or("preset_m", 2)?,
            amplitude: {
                let a: f64 = self.or("amplitude", 0.01)?;
                if !a.is_finite() {
                    return Err(LabError::value("amplitude", "must be finite"));
                }
                a
            },
            output_dir,
        })
    }
}

fn positive(key: &'static str, v: f64) -> Result<f64, LabError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(LabError::value(key, format!("must be positive and finite, got {v}")))
    }
}

fn at_least(key: &'static str, v: usize, min: usize) -> Result<usize, LabError> {
    if v >= min {
        Ok(v)
    } else {
        Err(LabError::value(key, format!("must be at least {min}, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn derived_temperature() {
        let cfg = parse_config(
            Command::Ness,
            None,
            &flags(&[("alpha", "0.05"), ("t1", "1"), ("t2", "3")]),
            None,
        )
        .unwrap();
        assert_eq!(cfg.t_inf(), 2.0);
        assert_eq!(cfg.snapshot()["t_inf"], "2");
    }

    #[test]
    fn alpha_range_error_names_key() {
        let err = parse_config(
            Command::Ness,
            None,
            &flags(&[("alpha", "1.5"), ("t1", "1"), ("t2", "3")]),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, LabError::Value { key: "alpha", .. }));
        assert!(err.to_string().contains("alpha"));
    }

    #[test]
    fn missing_and_unknown_keys() {
        let err = parse_config(Command::Rates, None, &flags(&[("alpha", "0"), ("t1", "1")]), None).unwrap_err();
        assert!(matches!(err, LabError::MissingKey("t2")));
        let err = parse_config_text("alpha = 0\nbogus = 1\n", Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, LabError::UnknownKey(ref k) if k == "bogus"));
    }

    #[test]
    fn file_syntax() {
        let m = parse_config_text("# comment\n alpha = 0.3 # trailing\n\nt1=1\n", Path::new("x.cfg")).unwrap();
        assert_eq!(m["alpha"], "0.3");
        assert_eq!(m["t1"], "1");
        let err = parse_config_text("alpha 0.3\n", Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, LabError::Syntax { line: 1, .. }));
        let err = parse_config_text("t1 = 1\nt1 = 2\n", Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, LabError::Syntax { line: 2, .. }));
    }

    #[test]
    fn output_dir_precedence() {
        let base = flags(&[("alpha", "0"), ("t1", "1"), ("t2", "1")]);
        let cfg = parse_config(Command::Rates, None, &base, None).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
        let cfg = parse_config(Command::Rates, None, &base, Some("from-env")).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("from-env"));
        let mut f = base.clone();
        f.insert("output_dir".into(), "from-flag".into());
        let cfg = parse_config(Command::Rates, None, &f, Some("from-env")).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("from-flag"));
    }

    #[test]
    fn enumerated_values() {
        let mut f = flags(&[
            ("alpha", "0"),
            ("t1", "1"),
            ("t2", "1"),
            ("convention", "unit"),
            ("scheme", "lie"),
        ]);
        let cfg = parse_config(Command::Evolve, None, &f, None).unwrap();
        assert_eq!(cfg.convention, FrequencyConvention::Unit);
        assert_eq!(cfg.scheme, Scheme::Lie);
        f.insert("preset".into(), "wave".into());
        let err = parse_config(Command::Evolve, None, &f, None).unwrap_err();
        assert!(matches!(err, LabError::Value { key: "preset", .. }));
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("bogus".parse::<Command>().is_err());
    }
}
