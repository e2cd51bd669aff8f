use std::io::Write;

use serde::Serialize;

use super::regularized::regularized_min;
use crate::error::{Error, Result};
use crate::operators::{NormWeight, PrimalDualPoint};
use crate::representations::Bifunction;
use crate::tolerance::TolClass;

/// Step budget of the refinement iteration.
pub const MAX_STEPS: usize = 200;

/// The iterates of a refinement run, in original coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementTrace {
    pub iterates: Vec<PrimalDualPoint>,
    /// `h(x_k, x_k*) − ⟨x_k, x_k*⟩`.
    pub gaps: Vec<f64>,
    /// Gap budget `θ^{k+1} ε₀` handed to step `k`.
    pub budgets: Vec<f64>,
    /// Shrink factor used by the regularized minimization of each step.
    pub taus: Vec<f64>,
    pub theta: f64,
    pub eps0: f64,
    /// The `ε` of the hypothesis `h(p) < π(p) + ε`.
    pub eps: f64,
    pub limit: PrimalDualPoint,
    /// Per step: `‖Δx‖² ≤ gap_k` and `‖Δx*‖² ≤ gap_k` in the weighted norms.
    pub step_bounds_ok: Vec<bool>,
    pub weight: NormWeight,
    pub converged: bool,
    pub diagnostic: Option<String>,
    pub tol_class: TolClass,
}

/// JSON summary of a trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub theta: f64,
    pub eps0: f64,
    pub eps: f64,
    pub scale: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_gap: f64,
    /// Weighted distances of the limit from the start.
    pub final_distance_x: f64,
    pub final_distance_xstar: f64,
    /// `√ε₀ / (1 − √θ)`.
    pub distance_bound: f64,
    pub sqrt_eps: f64,
    pub decay_ok: bool,
    pub steps_ok: bool,
    pub final_ok: bool,
    pub diagnostic: Option<String>,
}

impl RefinementTrace {
    pub fn start(&self) -> &PrimalDualPoint {
        &self.iterates[0]
    }

    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn final_gap(&self) -> f64 {
        *self.gaps.last().expect("a trace holds its start point")
    }

    /// Weighted norms of `x_{k+1} − x_k` and `x*_{k+1} − x*_k`.
    pub fn step_norms(&self, k: usize) -> (f64, f64) {
        let d = self.iterates[k + 1].sub(&self.iterates[k]);
        (self.weight.primal_norm(&d.x), self.weight.dual_norm(&d.xstar))
    }

    /// Weighted distances of the limit from the start.
    pub fn final_distances(&self) -> (f64, f64) {
        let d = self.limit.sub(self.start());
        (self.weight.primal_norm(&d.x), self.weight.dual_norm(&d.xstar))
    }

    pub fn distance_bound(&self) -> f64 {
        self.eps0.max(0.0).sqrt() / (1.0 - self.theta.sqrt())
    }

    /// `gaps[k] < θ^k ε₀ + tol` for every `k`.
    pub fn decay_ok(&self) -> bool {
        let tol = self.tol_class.refine();
        let mut bound = self.eps0.max(0.0);
        self.gaps.iter().all(|g| {
            let ok = *g < bound + tol;
            bound *= self.theta;
            ok
        })
    }

    pub fn steps_ok(&self) -> bool {
        self.step_bounds_ok.iter().all(|b| *b)
    }

    /// Final distances below both `√ε₀ / (1 − √θ)` (plus tolerance) and
    /// `√ε`.
    pub fn final_ok(&self) -> bool {
        let (dx, ds) = self.final_distances();
        let bound = self.distance_bound() + self.tol_class.refine();
        let root = self.eps.sqrt();
        dx <= bound && ds <= bound && dx < root && ds < root
    }

    pub fn summary(&self) -> TraceSummary {
        let (dx, ds) = self.final_distances();
        TraceSummary {
            theta: self.theta,
            eps0: self.eps0,
            eps: self.eps,
            scale: self.weight.s(),
            iterations: self.iterations(),
            converged: self.converged,
            final_gap: self.final_gap(),
            final_distance_x: dx,
            final_distance_xstar: ds,
            distance_bound: self.distance_bound(),
            sqrt_eps: self.eps.sqrt(),
            decay_ok: self.decay_ok(),
            steps_ok: self.steps_ok(),
            final_ok: self.final_ok(),
            diagnostic: self.diagnostic.clone(),
        }
    }

    /// Columns `k, x…, xstar…, gap, step_norm_x, step_norm_xstar`; the step
    /// norms of row `k` measure the move into `x_k`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.limit.dim();
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string()];
        header.extend((0..n).map(|i| format!("x{i}")));
        header.extend((0..n).map(|i| format!("xstar{i}")));
        header.extend(["gap", "step_norm_x", "step_norm_xstar"].map(String::from));
        w.write_record(&header).map_err(csv_err)?;
        for (k, p) in self.iterates.iter().enumerate() {
            let (sx, ss) = if k == 0 { (0.0, 0.0) } else { self.step_norms(k - 1) };
            let mut rec = vec![k.to_string()];
            rec.extend(p.x.iter().chain(&p.xstar).map(f64::to_string));
            rec.extend([self.gaps[k], sx, ss].map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv output failed: {e}"))
}

fn gap(h: &Bifunction, p: &PrimalDualPoint) -> Result<f64> {
    Ok(h.eval(p)?.value() - p.duality_product())
}

/// One refinement step: translate `h` to `z`, minimize the regularized
/// translate to within `ε`, and translate back. Returns the new point and
/// the shrink factor used.
fn step(h: &Bifunction, z: &PrimalDualPoint, eps: f64) -> Result<(PrimalDualPoint, f64)> {
    let g = gap(h, z)?;
    if !g.is_finite() {
        return Err(Error::Precondition(format!("h is not finite at {z:?}")));
    }
    if g <= 0.0 {
        return Ok((z.clone(), 1.0));
    }
    let hz = h.translate(&z.x, &z.xstar)?;
    let sol = regularized_min(&hz, eps)?;
    Ok((sol.point.add(z), sol.tau))
}

/// Moves `z` to a point with gap below `ε` and each component within
/// `√(h(z) − π(z))` of `z`. Points with nonpositive gap are returned as is.
pub fn br_step(h: &Bifunction, z: &PrimalDualPoint, eps: f64) -> Result<PrimalDualPoint> {
    if z.dim() != h.dim() {
        return Err(Error::dims("refinement point", h.dim(), z.dim()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    Ok(step(h, z, eps)?.0)
}

/// Refines `p` with `h(p) − π(p) < ε` to a point of zero gap.
///
/// With `ε₀ = h(p) − π(p)` and `r = √(ε₀/ε)`, the ratio is `√θ = (1 − r)/2`.
/// Step `k` runs [`br_step`] with budget `θ^{k+1} ε₀`, until the gap is at
/// most `tol_gap` or [`MAX_STEPS`] steps have run. In the latter case the
/// partial trace is returned with `converged = false`.
pub fn br_refine(h: &Bifunction, p: &PrimalDualPoint, eps: f64, tol_gap: f64) -> Result<RefinementTrace> {
    run(h, p, eps, tol_gap, NormWeight::UNIT)
}

/// [`br_refine`] in the norm `|||x||| = (√ε/λ)‖x‖`; the limit then lies
/// within `λ` of `x` and within `ε/λ` of `x*`.
pub fn br_refine_scaled(
    h: &Bifunction,
    p: &PrimalDualPoint,
    eps: f64,
    lambda: f64,
    tol_gap: f64,
) -> Result<RefinementTrace> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("λ must be positive, got {lambda}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("ε must be positive and finite, got {eps}")));
    }
    let w = NormWeight::new(eps.sqrt() / lambda)?;
    let hs = h.scaled(w.s())?;
    let mut trace = run(&hs, &w.to_scaled(p), eps, tol_gap, NormWeight::UNIT)?;
    trace.iterates = trace.iterates.iter().map(|q| w.from_scaled(q)).collect();
    trace.limit = w.from_scaled(&trace.limit);
    trace.weight = w;
    Ok(trace)
}

fn run(
    h: &Bifunction,
    p: &PrimalDualPoint,
    eps: f64,
    tol_gap: f64,
    weight: NormWeight,
) -> Result<RefinementTrace> {
    if p.dim() != h.dim() {
        return Err(Error::dims("refinement start", h.dim(), p.dim()));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("ε must be positive and finite, got {eps}")));
    }
    if !(tol_gap >= 0.0) {
        return Err(Error::InvalidParameter(format!("gap tolerance must be nonnegative, got {tol_gap}")));
    }
    let eps0 = gap(h, p)?;
    if !(eps0 < eps) {
        return Err(Error::Precondition(format!(
            "gap h(p) − π(p) = {eps0} is not below ε = {eps}"
        )));
    }
    let class = h.tol_class();
    let tol = class.refine();
    let r = (eps0.max(0.0) / eps).sqrt();
    let sqrt_theta = 0.5 * (1.0 - r);
    let theta = sqrt_theta * sqrt_theta;

    let mut iterates = vec![p.clone()];
    let mut gaps = vec![eps0];
    let mut budgets = Vec::new();
    let mut taus = Vec::new();
    let mut step_ok = Vec::new();
    let mut budget = eps0;
    let mut converged = false;
    for _ in 0..MAX_STEPS {
        let z = iterates.last().expect("nonempty");
        let gk = *gaps.last().expect("nonempty");
        if gk <= tol_gap {
            converged = true;
            break;
        }
        budget *= theta;
        let (next, tau) = step(h, z, budget)?;
        let d = next.sub(z);
        let (dx, ds) = (weight.primal_norm(&d.x), weight.dual_norm(&d.xstar));
        step_ok.push(dx * dx <= gk + tol && ds * ds <= gk + tol);
        gaps.push(gap(h, &next)?);
        budgets.push(budget);
        taus.push(tau);
        iterates.push(next);
    }
    if !converged && *gaps.last().expect("nonempty") <= tol_gap {
        converged = true;
    }
    let diagnostic = (!converged).then(|| {
        format!(
            "step budget of {MAX_STEPS} exhausted with gap {:e} above {tol_gap:e}",
            gaps.last().expect("nonempty")
        )
    });
    Ok(RefinementTrace {
        limit: iterates.last().expect("nonempty").clone(),
        iterates,
        gaps,
        budgets,
        taus,
        theta,
        eps0,
        eps,
        step_bounds_ok: step_ok,
        weight,
        converged,
        diagnostic,
        tol_class: class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexfn::ConvexFunction;
    use crate::linalg;
    use crate::operators::MonotoneOperator;
    use crate::tolerance::TOL_GAP;

    fn pt(x: f64, s: f64) -> PrimalDualPoint {
        PrimalDualPoint::new(vec![x], vec![s]).unwrap()
    }

    fn half_square() -> Bifunction {
        Bifunction::separable(ConvexFunction::half_square(1).unwrap()).unwrap()
    }

    #[test]
    fn step_on_graph_is_identity() {
        let z = pt(0.7, 0.7);
        assert_eq!(br_step(&half_square(), &z, 0.1).unwrap(), z);
    }

    #[test]
    fn step_from_off_diagonal_point() {
        let h = half_square();
        let z = pt(0.0, 1.0);
        let q = br_step(&h, &z, 0.05).unwrap();
        assert!(gap(&h, &q).unwrap() < 0.05);
        assert!((q.x[0] - z.x[0]).powi(2) <= 0.5);
        assert!((q.xstar[0] - z.xstar[0]).powi(2) <= 0.5);
        // Exact inner solution before shrinking: (½, ½).
        let inner = regularized_min(&h.translate(&z.x, &z.xstar).unwrap(), 0.05).unwrap();
        let m = inner.minimizer.add(&z);
        assert!((m.x[0] - 0.5).abs() < 1e-12 && (m.xstar[0] - 0.5).abs() < 1e-12);
    }

    /// Fine grid search for the regularized translated problem.
    #[test]
    fn fitzpatrick_step_matches_grid_search() {
        let h = Bifunction::fitzpatrick(&MonotoneOperator::identity(1).unwrap()).unwrap();
        let z = pt(0.0, 1.0);
        let hz = h.translate(&z.x, &z.xstar).unwrap();
        let sol = regularized_min(&hz, 0.05).unwrap();
        let mut best = f64::INFINITY;
        for i in -1000..=1000 {
            for j in -1000..=1000 {
                let w = [i as f64 * 1e-3, j as f64 * 1e-3];
                best = best.min(hz.eval_w(&w).unwrap() + 0.5 * linalg::norm_sq(&w));
            }
        }
        assert!(sol.minimizer_value <= best + 1e-12);
        assert!(sol.minimizer_value >= best - 1e-5);
        let q = br_step(&h, &z, 0.05).unwrap();
        assert!(gap(&h, &q).unwrap() < 0.05);
        assert!(q.x[0].powi(2) <= 0.25 + 1e-12 && (q.xstar[0] - 1.0).powi(2) <= 0.25 + 1e-12);
    }

    #[test]
    fn refine_examples() {
        let h = half_square();
        let t = br_refine(&h, &pt(0.4, 0.4), 0.1, TOL_GAP).unwrap();
        assert_eq!(t.iterates.len(), 1);
        assert_eq!(t.limit, pt(0.4, 0.4));

        let t = br_refine(&h, &pt(0.0, 1.0), 0.6, TOL_GAP).unwrap();
        assert!(t.converged);
        assert!(t.decay_ok() && t.steps_ok() && t.final_ok(), "{:?}", t.summary());
        assert!((t.limit.x[0] - t.limit.xstar[0]).abs() < 1e-4);
        assert!(t.limit.x[0].abs() < 0.6_f64.sqrt());
        assert!((t.limit.xstar[0] - 1.0).abs() < 0.6_f64.sqrt());

        assert!(matches!(
            br_refine(&h, &pt(0.0, 1.0), 0.5, TOL_GAP),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn scaled_refinement_window() {
        // φ of the identity has gap ¼ at (0, 1).
        let h = Bifunction::fitzpatrick(&MonotoneOperator::identity(1).unwrap()).unwrap();
        let t = br_refine_scaled(&h, &pt(0.0, 1.0), 0.26, 0.5, TOL_GAP).unwrap();
        let x = t.limit.x[0];
        assert!(x > 0.48 && x < 0.5, "{x}");
        assert!(t.final_ok());
    }

    #[test]
    fn neutral_scale_matches_unscaled() {
        let h = Bifunction::fitzpatrick(&MonotoneOperator::identity(1).unwrap()).unwrap();
        let p = pt(0.2, 0.9);
        let a = br_refine(&h, &p, 0.3, TOL_GAP).unwrap();
        let b = br_refine_scaled(&h, &p, 0.3, 0.3_f64.sqrt(), TOL_GAP).unwrap();
        assert!(a.limit.distance(&b.limit) < 1e-9);
    }

    #[test]
    fn csv_and_summary() {
        let t = br_refine(&half_square(), &pt(0.0, 1.0), 0.6, TOL_GAP).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,x0,xstar0,gap,step_norm_x,step_norm_xstar"));
        assert_eq!(text.lines().count(), t.iterates.len() + 1);
        let s = serde_json::to_value(t.summary()).unwrap();
        assert_eq!(s["converged"], true);
    }
}
