//! Repo-wide tolerance ladder.
//!
//! One decade of separation between numerical noise and decisions:
//! cone membership is judged at 1e-9, linear constraints at 1e-7,
//! certificate margins at 1e-8, and user-facing verdicts at 1e-6.

/// Hermiticity check after construction.
pub const EPS_HERM: f64 = 1e-12;

/// Cone membership: smallest eigenvalue allowed below zero.
pub const EPS_PSD: f64 = 1e-9;

/// Unit-trace check on density matrices.
pub const EPS_TR: f64 = 1e-10;

/// Linear equality constraints in SDP solutions.
pub const EPS_FEAS: f64 = 1e-7;

/// Farkas certificate margin (after sup-norm renormalization).
pub const EPS_CERT: f64 = 1e-8;

/// Feasible/infeasible verdicts surfaced to users.
pub const EPS_DECISION: f64 = 1e-6;

/// Rank decisions in orthonormalization of unit-normalized inputs.
pub const EPS_RANK: f64 = 1e-9;
