use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{self, Vector};
use crate::operators::PrimalDualPoint;
use crate::representations::Bifunction;
use crate::tolerance::TolClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularizedBranch {
    /// `h(0, 0) < ε`: the origin already qualifies.
    Trivial,
    /// `ε ≤ h(0, 0) < ∞`: rescaled minimizer with strict norm bounds.
    Bounded,
    /// `h(0, 0) = ∞`: no norm bound is available.
    Unbounded,
}

/// Result of minimizing `h(w) + ½‖w‖²` to within `ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedSolution {
    /// The returned point `(x̃, x̃*)`.
    pub point: PrimalDualPoint,
    /// `h(x̃, x̃*) + ½‖x̃‖² + ½‖x̃*‖²`.
    pub value: f64,
    /// Exact minimizer `x_η` of the regularized function.
    pub minimizer: PrimalDualPoint,
    #[serde(serialize_with = "crate::extreal::serialize_f64")]
    pub minimizer_value: f64,
    /// `(ẑ*, ẑ**)`, the minimizer of `h*(w) + ½‖w‖²`.
    pub dual_certificate: PrimalDualPoint,
    /// `h*(ẑ*, ẑ**) + ½‖ẑ*‖² + ½‖ẑ**‖²`.
    #[serde(serialize_with = "crate::extreal::serialize_f64")]
    pub certificate_value: f64,
    /// `h(0, 0)`.
    pub norm_bound: ExtReal,
    pub eta: Option<f64>,
    pub tau: f64,
    pub branch: RegularizedBranch,
    /// Whether `‖x̃‖² < h(0, 0)` and `‖x̃*‖² < h(0, 0)` (non-strict on the
    /// trivial branch); `None` on the unbounded branch.
    pub norm_bounds_hold: Option<bool>,
    pub tol_class: TolClass,
}

fn regularized_value(h: &Bifunction, w: &[f64]) -> Result<f64> {
    Ok(h.eval_w(w)? + 0.5 * linalg::norm_sq(w))
}

/// Finds `(x̃, x̃*)` with `h(x̃, x̃*) + ½‖x̃‖² + ½‖x̃*‖² < ε`.
///
/// The regularized function is minimized exactly through the proximal map
/// at the origin. When `h(0, 0) ≥ ε` the minimizer is shrunk toward the
/// origin by `τ = √h₀₀ / (√h₀₀ + √(2η))` with `η = ε² / (4 h₀₀)`, which
/// keeps the value below `ε` and makes both norm bounds strict.
///
/// `h` is expected to satisfy `h ≥ π` and `h* ≥ π`; this is not checked
/// here (see `check_dual_condition`).
pub fn regularized_min(h: &Bifunction, eps: f64) -> Result<RegularizedSolution> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("ε must be positive and finite, got {eps}")));
    }
    let n = h.dim();
    let zero = vec![0.0; 2 * n];
    let ones = vec![1.0; 2 * n];
    let h00 = h.eval_w(&zero)?;

    let minimizer = h.prox(&zero, &ones)?;
    let minimizer_value = regularized_value(h, &minimizer)?;

    let hc = h.conjugate()?;
    let cert = hc.prox(&zero, &ones)?;
    let certificate_value = regularized_value(&hc, &cert)?;

    let (branch, point, eta, tau): (_, Vector, _, _) = if h00 < eps {
        (RegularizedBranch::Trivial, zero.clone(), None, 1.0)
    } else if h00.is_finite() {
        let eta = eps * eps / (4.0 * h00);
        let tau = h00.sqrt() / (h00.sqrt() + (2.0 * eta).sqrt());
        (RegularizedBranch::Bounded, linalg::scale(&minimizer, tau), Some(eta), tau)
    } else {
        (RegularizedBranch::Unbounded, minimizer.clone(), None, 1.0)
    };
    let value = regularized_value(h, &point)?;
    if !(value < eps) {
        return Err(Error::SolverFailure {
            message: format!("regularized value did not drop below ε = {eps}"),
            best_value: value.min(minimizer_value),
        });
    }
    let point = PrimalDualPoint::from_stacked(&point);
    let (nx, ns) = (linalg::norm_sq(&point.x), linalg::norm_sq(&point.xstar));
    let norm_bounds_hold = match branch {
        RegularizedBranch::Trivial => Some(nx <= h00 && ns <= h00),
        RegularizedBranch::Bounded => Some(nx < h00 && ns < h00),
        RegularizedBranch::Unbounded => None,
    };
    Ok(RegularizedSolution {
        point,
        value,
        minimizer: PrimalDualPoint::from_stacked(&minimizer),
        minimizer_value,
        dual_certificate: PrimalDualPoint::from_stacked(&cert),
        certificate_value,
        norm_bound: ExtReal::from(h00),
        eta,
        tau,
        branch,
        norm_bounds_hold,
        tol_class: h.tol_class(),
    })
}
