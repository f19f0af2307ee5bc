//! Error type shared by every numerical routine in the crate.

use alloc::string::String;

/// Failures reported by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Two objects that must share a discretization do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The requested evaluation sits on a singularity of the formula.
    #[error("singular parameter: {0}")]
    Singular(String),

    /// A density (or temperature) reconstruction is not strictly positive.
    #[error("{what} lost positivity (min {min:.6e}){}", fmt_iteration(.iteration))]
    Domain {
        what: &'static str,
        min: f64,
        iteration: Option<usize>,
    },

    /// Orthogonalization broke down before the requested basis size.
    #[error("basis construction lost conditioning at order {order}; use at most {suggested_cap} functions")]
    Conditioning { order: usize, suggested_cap: usize },

    /// An iterative eigen-solver did not converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

fn fmt_iteration(iteration: &Option<usize>) -> String {
    match iteration {
        Some(n) => alloc::format!(" at iterate {n}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
