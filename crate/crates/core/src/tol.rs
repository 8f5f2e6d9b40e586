//! Tolerances used across the crate.
//!
//! "Perfect" winning has no numerical definition in the source material;
//! [`WIN_TOL`] is our choice and every public check takes an explicit `tol`
//! so callers can override it.

/// Default tolerance for winning-condition checks.
pub const WIN_TOL: f64 = 1e-9;

/// Tolerance for probability-vector normalisation.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Slack allowed on box constraints of individual probabilities.
pub const ENTRY_TOL: f64 = 1e-12;

/// Upper edge of the band in which partition equalities are reported as
/// boundary-indeterminate rather than infeasible.
pub const BOUNDARY_BAND: f64 = 1e-6;

/// Residual above which numeric searches declare a game unwinnable.
pub const INFEASIBLE_RESIDUAL: f64 = 1e-3;
