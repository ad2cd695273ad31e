//! D1Q3 lattice Boltzmann scheme with relative velocity.
//!
//! * [`scheme`]: moment, shift, rate and equilibrium matrices and the
//!   relaxation matrix `R`.
//! * [`stability`]: non-negativity of `R` by three routes, feasible `γ`/`α`
//!   ranges and the explicit `u = 0` and necessary regions.
//! * [`regionscan`]: `(s, s')` region maps with CSV and SVG output.
//! * [`simulator`]: periodic advection runs with non-negativity and
//!   oscillation diagnostics.
//! * [`cli`]: the `d1q3` command-line tool.

pub mod cli;
pub mod matrix;
pub mod regionscan;
pub mod scheme;
pub mod simulator;
pub mod stability;

pub use matrix::{Matrix3, TAU_MAT};
pub use scheme::{MomentVector, SchemeParameters};
pub use stability::{StabilityVerdict, GUARD_BAND, TAU_STAB};
