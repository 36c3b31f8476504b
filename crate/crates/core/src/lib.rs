// `!(x > 0.0)` guards reject NaN as well; wrap-index loops read better as ranges.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

//! Linear growth rates of gravity-driven (Rayleigh-Taylor /
//! Kruskal-Schwarzschild type) instabilities for ideal MHD steady states.
//!
//! The crate discretizes the per-wave-number variational eigenvalue problems
//! of the linearized system on a uniform 1D mesh, solves the resulting
//! symmetric matrix pencils, computes the spectral radius Lambda^2, evaluates
//! instability criteria, and cross-validates growth rates against a
//! time-domain integration of the second-order linearized equation.
//!
//! Module map:
//! - [`grid`], [`profiles`]: mesh and magnetohydrostatic backgrounds
//! - [`operators`]: pencil assembly for the four background-field cases
//! - [`spectra`]: eigen solves, wave-number sweeps, instability criteria
//! - [`timedomain`]: leapfrog integration and growth-rate fits
//! - [`symmetrize`]: the 7x7 symmetrizer algebra of the compressible system
//! - [`modes`]: dominant normal mode, escape time, vector-identity checks

pub mod error;
pub mod grid;
pub mod modes;
pub mod operators;
pub mod profiles;
pub mod spectra;
pub mod symmetrize;
pub mod timedomain;

pub use error::{Error, Result};

/// Format a float with 17 significant digits, enough to round-trip f64 and
/// keep emitted files byte-reproducible. Negative zero is normalized.
pub fn fmt_g17(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.16e}", x)
}
