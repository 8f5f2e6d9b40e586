//! Solver and simulator for single-shot two-party "Restaurant" communication
//! games.
//!
//! Alice learns which of `n` Restaurants is closed and sends Bob one use of a
//! communication resource; Bob must never visit the closed Restaurant while
//! hitting prescribed visiting frequencies `γ`. This crate decides and
//! synthesises winning strategies for classical bits (with and without
//! shared randomness), qubits and polygon toy theories, and hosts the
//! related no-signalling-box and worst-case guessing games.

// Indexed loops mirror the matrix formulas; `!(x > y)` comparisons are how
// NaN gets rejected.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod game;
pub mod audit;
pub mod classical;
pub mod lp;
pub mod nsbox;
pub mod optim;
pub mod polygon;
pub mod prob;
pub mod sweep;
pub mod qubit;
pub mod tol;
pub mod worstcase;

pub use error::{Error, Result};
pub use game::{check_game, convex_mix, game_space_extreme_points, GameSpec, VisitMatrix, Verdict};
pub use prob::ProbVector;
