//! Numerical core for the one-dimensional BGK equation coupled to two thermal
//! reservoirs on the unit torus.
//!
//! The crate is `no_std` (it needs `alloc`). It covers the uniform steady
//! state, the density fixed-point map whose fixed points are steady states,
//! the linearized collision operator in an orthonormal velocity basis with
//! its per-mode hypocoercivity certificates, and time integration of both
//! the nonlinear and the linearized equations.

#![no_std]
// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// The `Float` imports are needed without std and shadowed by inherent
// methods when std is anywhere in the build graph.

extern crate alloc;

pub mod corpus;
pub mod error;
pub mod evolution;
pub mod field;
pub mod fourier;
pub mod linalg;
pub mod model;
pub mod ness;
pub mod quadrature;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use field::{compute_moments, weighted_norm, DensityProfile, Moments, PhaseField};
pub use model::{maxwellian, reservoir_mix, uniform_ness, ModelParams, VelocityGrid};
pub use num_complex::Complex64;
