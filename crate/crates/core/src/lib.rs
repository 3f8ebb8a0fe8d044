//! Exact solver and verification toolkit for infinite-horizon linear
//! dynamic optimization with linear constraints: maximize
//! `sum_t p^(t) x_t` over state sequences with
//! `x_{t+1} in [0, min{c_t + a_t x_t, b}]` and `x_0` fixed.
//!
//! Everything runs in exact rational arithmetic. The pieces:
//!
//! - [`problem`]: problem data, validation, classification inputs.
//! - [`sequence`]: eventually-geometric coefficient sequences with exact
//!   tail sums and infinite sign checks.
//! - [`trajectory`]: feasibility, transition intervals, and the
//!   feasibility-preserving transformations.
//! - [`pwl`]: piecewise-linear concave value functions.
//! - [`dp`]: backward induction, horizon selection, greedy extraction,
//!   Bellman residuals.
//! - [`certificates`]: per-period LP optimality multipliers and their
//!   verification.
//! - [`rules`]: necessary endpoint conditions and closed-form optimal
//!   trajectories for alternating, conclusive, and two-phase weights.
//! - [`oracle`]: independent brute-force grid enumeration.
//! - [`instances`]: named reference problems and seeded random families.
//! - [`io`]: JSON/CSV formats.

pub mod certificates;
pub mod classify;
pub mod dp;
pub mod instances;
pub mod io;
pub mod oracle;
pub mod problem;
pub mod pwl;
pub mod rational;
pub mod rules;
pub mod sequence;
pub mod trajectory;
