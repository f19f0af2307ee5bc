//! Linearized dynamics in the orthonormal velocity basis: basis construction,
//! per-mode matrices, explicit rates and the abstract hypocoercivity constants.

pub mod basis;
pub mod blocks;
pub mod dms;
pub mod modal;
pub mod operator;
pub mod rates;

pub use basis::{build_basis, c_alpha_closed_form, SpectralBasis};
pub use blocks::{
    assemble_mode_block, coercivity_check, collision_apply, quadratic_form_gap, FrequencyConvention, ModeBlock,
};
pub use dms::{dms_constants, DmsConstants};
pub use modal::ModalField;
pub use rates::{explicit_rate, gap_table, numeric_gap, ExplicitRate, GapReport, RateCase};
