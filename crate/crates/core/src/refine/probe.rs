use serde::Serialize;

use super::iteration::{br_refine, br_refine_scaled, RefinementTrace};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{self, Vector};
use crate::operators::{eps_enlargement_test, MonotoneOperator, PrimalDualPoint};
use crate::representations::Bifunction;
use crate::tolerance::{TolClass, TOL_GAP, TOL_PROBE, TOL_X};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrictBrReport {
    /// The graph point `(x̄_λ, x̄*_λ)`.
    pub point: PrimalDualPoint,
    /// Limit of the refinement before projecting onto the graph.
    pub limit: PrimalDualPoint,
    pub snap_distance_x: f64,
    pub snap_distance_xstar: f64,
    /// `‖x − x̄_λ‖` and `‖x* − x̄*_λ‖`.
    pub distance_x: f64,
    pub distance_xstar: f64,
    /// Distances of the limit from `p` plus the snap distances.
    pub reported_bound_x: f64,
    pub reported_bound_xstar: f64,
    pub lambda: f64,
    /// `η / λ`.
    pub dual_radius: f64,
    pub within_bounds: bool,
    pub enlargement_inf: ExtReal,
    pub trace: RefinementTrace,
}

/// For `p` in the `ε`-enlargement of `T` and any `η > ε`, `λ > 0`, finds a
/// graph point within `λ` of `x` and within `η/λ` of `x*`.
///
/// Refines `p` against the Fitzpatrick function of `T` in the norm scaled
/// by `√η/λ`, then projects the limit onto the graph.
pub fn strict_br(
    t: &MonotoneOperator,
    p: &PrimalDualPoint,
    eps: f64,
    eta: f64,
    lambda: f64,
) -> Result<StrictBrReport> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("ε must be nonnegative, got {eps}")));
    }
    if !(eta > eps) || !eta.is_finite() {
        return Err(Error::Precondition(format!("η = {eta} must exceed ε = {eps}")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("λ must be positive, got {lambda}")));
    }
    let enl = eps_enlargement_test(t, p, eps)?;
    if !enl.inside {
        return Err(Error::NotInEnlargement {
            eps,
            inf: enl.inf.value(),
        });
    }
    let h = Bifunction::fitzpatrick(t)?;
    let trace = br_refine_scaled(&h, p, eta, lambda, TOL_GAP)?;
    if !trace.converged {
        return Err(Error::SolverFailure {
            message: trace.diagnostic.clone().unwrap_or_default(),
            best_value: trace.final_gap(),
        });
    }
    let limit = trace.limit.clone();
    let point = t.project_to_graph(&limit)?;
    let snap = point.sub(&limit);
    let (snap_x, snap_s) = (linalg::norm(&snap.x), linalg::norm(&snap.xstar));
    let to_limit = limit.sub(p);
    let to_point = point.sub(p);
    let (dx, ds) = (linalg::norm(&to_point.x), linalg::norm(&to_point.xstar));
    let bx = linalg::norm(&to_limit.x) + snap_x;
    let bs = linalg::norm(&to_limit.xstar) + snap_s;
    let dual_radius = eta / lambda;
    Ok(StrictBrReport {
        within_bounds: bx < lambda && bs < dual_radius,
        point,
        limit,
        snap_distance_x: snap_x,
        snap_distance_xstar: snap_s,
        distance_x: dx,
        distance_xstar: ds,
        reported_bound_x: bx,
        reported_bound_xstar: bs,
        lambda,
        dual_radius,
        enlargement_inf: enl.inf,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    /// Whether the graph points `(x̄_k, x̄*_k)` reached `z`.
    pub verdict: bool,
    pub points: Vec<PrimalDualPoint>,
    /// `‖(x̄_k, x̄*_k) − z‖`.
    pub distances: Vec<f64>,
    pub steps: usize,
    /// `inf ⟨x − y, x* − y*⟩` over the graph of `T`.
    pub enlargement_inf: ExtReal,
    pub tol_class: TolClass,
}

/// Exhibits a point `z` monotonically related to the graph of `T` as a limit
/// of graph points, as in the maximality argument for representable
/// operators.
///
/// `h` represents `T`. For `k = 1, 2, …` a point `u_k` with
/// `h_z(u_k) + ½‖u_k‖² < 1/k²` is refined with [`br_refine`] against `h_z`,
/// and `x̄_k = ū_k + z` is recorded. The verdict is true once
/// `‖x̄_k − z‖ ≤ tol_probe`.
pub fn maximality_probe(
    h: &Bifunction,
    t: &MonotoneOperator,
    z: &PrimalDualPoint,
    budget: usize,
) -> Result<ProbeReport> {
    if h.dim() != z.dim() || t.dim() != z.dim() {
        return Err(Error::dims("probe point", h.dim(), z.dim()));
    }
    let enl = eps_enlargement_test(t, z, 0.0)?;
    if !enl.inside {
        return Err(Error::NotMonotonicallyRelated {
            inf: enl.inf.value(),
            witness: enl.witness,
        });
    }
    let class = h.tol_class().join(t.tol_class());
    if t.graph_contains(z, TOL_X)? {
        return Ok(ProbeReport {
            verdict: true,
            points: vec![z.clone()],
            distances: vec![0.0],
            steps: 0,
            enlargement_inf: enl.inf,
            tol_class: class,
        });
    }
    let n = z.dim();
    let hz = h.translate(&z.x, &z.xstar)?;
    let phi = |u: &[f64]| -> Result<f64> { Ok(hz.eval_w(u)? + 0.5 * linalg::norm_sq(u)) };
    let ustar = hz.prox(&vec![0.0; 2 * n], &vec![1.0; 2 * n])?;
    let mut u0: Vector = ustar
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { v + 0.5 } else { v - 0.5 })
        .collect();
    if !phi(&u0)?.is_finite() {
        u0 = vec![0.0; 2 * n];
    }
    let phi0 = phi(&u0)?;
    if !phi0.is_finite() {
        return Err(Error::Precondition("translated function is +inf at the probe start".into()));
    }

    let mut points = Vec::new();
    let mut distances = Vec::new();
    let mut verdict = false;
    let mut steps = 0;
    for k in 1..=budget {
        steps = k;
        let target = 1.0 / (k * k) as f64;
        let rho = if phi0 > 0.0 { (target / phi0).min(1.0) / 2.0 } else { 0.5 };
        let uk: Vector = ustar.iter().zip(&u0).map(|(s, a)| s + rho * (a - s)).collect();
        let trace = br_refine(&hz, &PrimalDualPoint::from_stacked(&uk), target, TOL_GAP)?;
        if !trace.converged {
            return Err(Error::SolverFailure {
                message: trace.diagnostic.unwrap_or_default(),
                best_value: trace.gaps.last().copied().unwrap_or(f64::INFINITY),
            });
        }
        let xbar = trace.limit.add(z);
        let d = xbar.distance(z);
        points.push(xbar);
        distances.push(d);
        if d <= TOL_PROBE {
            verdict = true;
            break;
        }
    }
    Ok(ProbeReport {
        verdict,
        points,
        distances,
        steps,
        enlargement_inf: enl.inf,
        tol_class: class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::ConvexFunction;
    use crate::tolerance::PROBE_BUDGET;

    fn pt(x: f64, s: f64) -> PrimalDualPoint {
        PrimalDualPoint::new(vec![x], vec![s]).unwrap()
    }

    #[test]
    fn strict_br_identity_window() {
        let id = MonotoneOperator::identity(1).unwrap();
        let r = strict_br(&id, &pt(0.0, 1.0), 0.25, 0.3, 0.5).unwrap();
        let (x, s) = (r.point.x[0], r.point.xstar[0]);
        assert!((x - s).abs() < 1e-12);
        assert!(x > 0.4 && x < 0.5, "{x}");
        assert!(r.within_bounds);
    }

    #[test]
    fn strict_br_on_graph_returns_point() {
        let id = MonotoneOperator::identity(1).unwrap();
        let r = strict_br(&id, &pt(0.3, 0.3), 0.0, 0.1, 2.0).unwrap();
        assert!(r.point.distance(&pt(0.3, 0.3)) < 1e-12);
    }

    #[test]
    fn strict_br_rejects_outside_enlargement() {
        let id = MonotoneOperator::identity(1).unwrap();
        let e = strict_br(&id, &pt(0.0, 1.0), 0.2, 0.3, 0.5).unwrap_err();
        match e {
            Error::NotInEnlargement { inf, .. } => assert!((inf + 0.25).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            strict_br(&id, &pt(0.0, 1.0), 0.3, 0.3, 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn strict_br_sampled_rotation() {
        let rot = MonotoneOperator::rotation2d();
        let xs: Vec<Vector> = (-10..=10)
            .flat_map(|i| (-10..=10).map(move |j| vec![i as f64 * 0.1, j as f64 * 0.1]))
            .collect();
        let t = MonotoneOperator::sampled(rot.sample_graph(&xs).unwrap()).unwrap();
        let p = PrimalDualPoint::new(vec![0.3, 0.2], vec![-0.15, 0.35]).unwrap();
        let inf = eps_enlargement_test(&t, &p, 0.0).unwrap().inf.value();
        let eps = (-inf).max(0.0);
        let r = strict_br(&t, &p, eps, eps + 0.05, 0.4).unwrap();
        assert!(t.graph_contains(&r.point, 1e-12).unwrap());
        assert!(r.distance_x < 0.4 && r.distance_xstar < (eps + 0.05) / 0.4, "{r:?}");
    }

    fn sampled_identity_without_half() -> MonotoneOperator {
        let pts = (0..40)
            .map(|i| {
                let t = -2.0 + 0.1 * i as f64 + 0.03;
                pt(t, t)
            })
            .collect();
        MonotoneOperator::sampled(pts).unwrap()
    }

    #[test]
    fn probe_converges_to_related_point() {
        let h = Bifunction::separable(ConvexFunction::half_square(1).unwrap()).unwrap();
        let t = sampled_identity_without_half();
        let r = maximality_probe(&h, &t, &pt(0.5, 0.5), PROBE_BUDGET).unwrap();
        assert!(r.verdict, "{:?}", r.distances);
        assert!(r.steps <= PROBE_BUDGET);
    }

    #[test]
    fn probe_on_graph_is_immediate() {
        let h = Bifunction::separable(ConvexFunction::half_square(1).unwrap()).unwrap();
        let id = MonotoneOperator::identity(1).unwrap();
        let r = maximality_probe(&h, &id, &pt(0.5, 0.5), PROBE_BUDGET).unwrap();
        assert!(r.verdict);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn probe_rejects_unrelated_point() {
        let h = Bifunction::separable(ConvexFunction::half_square(1).unwrap()).unwrap();
        let id = MonotoneOperator::identity(1).unwrap();
        match maximality_probe(&h, &id, &pt(0.0, 1.0), PROBE_BUDGET).unwrap_err() {
            Error::NotMonotonicallyRelated { inf, .. } => assert!((inf + 0.25).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
