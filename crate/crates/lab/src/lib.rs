//! Command-line laboratory for the two-reservoir BGK model.
//!
//! A run is `bgk-lab <command> [--config FILE] [--key value]...`. Each command
//! writes CSV series and JSON reports to the output directory together with a
//! `manifest.json` recording the resolved configuration, checksums of every
//! file and the outcome of each assertion. The exit status is 0 when every
//! assertion passes, 1 when one fails, 2 for usage errors and 3 for numerical
//! domain errors.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, RunConfig};
pub use error::LabError;
pub use output::RunManifest;
pub use run::run;
