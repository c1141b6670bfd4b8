//! Explicit semi-Lagrangian spectral element method for 1D linear advection.
//!
//! The crate assembles the exact one-step discrete update of the method on a
//! single element (advect the monomial interpolant, project back to the nodes,
//! then correct with a least-squares fit against two interface constraints),
//! and provides the instruments used to study it:
//!
//! - [`analysis::modified_equation`]: truncation coefficients of the modified
//!   equation from the logarithm of the center-node symbol,
//! - [`analysis::dispersion_curve`]: effective wavenumber κ*Δx,
//! - [`analysis::vn_stability_limit`]: scalar Von Neumann limit,
//! - [`analysis::spectrum_sweep`] and [`analysis::block_symbol_radius`]:
//!   eigenvalues of the element recursion matrices,
//! - [`solver::run`]: time stepping on a periodic mesh with L2 error reporting.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
mod error;
pub mod linalg;
pub mod operator;
pub mod solver;

pub use error::{Error, Result};
