//! Numerical tolerances.
//!
//! Two classes exist: closed-form paths, whose only error is floating-point
//! rounding, and grid-backed paths, which also carry discretization noise.

use serde::{Deserialize, Serialize};

/// Monotonicity slack for analytic operators.
pub const TOL_MONO: f64 = 1e-9;
/// Monotonicity slack for sampled graphs.
pub const TOL_MONO_SAMPLED: f64 = 1e-6;
/// Matching tolerance for primal coordinates in sampled graphs.
pub const TOL_X: f64 = 1e-9;

pub const TOL_DUAL: f64 = 1e-9;
pub const TOL_DUAL_GRID: f64 = 1e-6;

pub const TOL_REP: f64 = 1e-9;
pub const TOL_REP_GRID: f64 = 1e-6;

pub const TOL_REF: f64 = 1e-9;
pub const TOL_REF_GRID: f64 = 1e-6;

/// Stopping gap of the refinement iteration.
pub const TOL_GAP: f64 = 1e-8;
/// Distance at which the maximality probe declares convergence.
pub const TOL_PROBE: f64 = 1e-3;
pub const PROBE_BUDGET: usize = 200;

/// Number of random midpoint tests in convexity checks.
pub const CONVEXITY_TRIALS: usize = 1000;

/// Which noise floor a computed quantity is subject to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TolClass {
    #[default]
    ClosedForm,
    Grid,
}

impl TolClass {
    pub fn mono(self) -> f64 {
        match self {
            TolClass::ClosedForm => TOL_MONO,
            TolClass::Grid => TOL_MONO_SAMPLED,
        }
    }

    pub fn dual(self) -> f64 {
        match self {
            TolClass::ClosedForm => TOL_DUAL,
            TolClass::Grid => TOL_DUAL_GRID,
        }
    }

    pub fn rep(self) -> f64 {
        match self {
            TolClass::ClosedForm => TOL_REP,
            TolClass::Grid => TOL_REP_GRID,
        }
    }

    pub fn refine(self) -> f64 {
        match self {
            TolClass::ClosedForm => TOL_REF,
            TolClass::Grid => TOL_REF_GRID,
        }
    }

    /// The coarser of two classes.
    pub fn join(self, other: TolClass) -> TolClass {
        if self == TolClass::Grid || other == TolClass::Grid {
            TolClass::Grid
        } else {
            TolClass::ClosedForm
        }
    }
}
