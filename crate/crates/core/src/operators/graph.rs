//! Euclidean projection of a pair `(x, x*)` onto the graph of an operator.

use super::operator::{MonotoneOperator, OperatorKind};
use super::point::PrimalDualPoint;
use crate::convexfn::{ConvexFunction, FnKind};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

/// A closed planar curve made of a ray, segments and a ray.
struct Polyline {
    vertices: Vec<(f64, f64)>,
    start_dir: (f64, f64),
    end_dir: (f64, f64),
}

fn project_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let d = (b.0 - a.0, b.1 - a.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    if len2 == 0.0 {
        return a;
    }
    let t = (((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / len2).clamp(0.0, 1.0);
    (a.0 + t * d.0, a.1 + t * d.1)
}

fn project_ray(p: (f64, f64), a: (f64, f64), d: (f64, f64)) -> (f64, f64) {
    let t = ((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1).max(0.0);
    (a.0 + t * d.0, a.1 + t * d.1)
}

impl Polyline {
    fn project(&self, p: (f64, f64)) -> (f64, f64) {
        let first = self.vertices[0];
        let last = self.vertices[self.vertices.len() - 1];
        let mut cands = vec![
            project_ray(p, first, self.start_dir),
            project_ray(p, last, self.end_dir),
        ];
        for w in self.vertices.windows(2) {
            cands.push(project_segment(p, w[0], w[1]));
        }
        let d2 = |q: &(f64, f64)| (q.0 - p.0).powi(2) + (q.1 - p.1).powi(2);
        cands
            .into_iter()
            .min_by(|a, b| d2(a).total_cmp(&d2(b)))
            .expect("nonempty")
    }
}

/// Graph of `∂δ_[l,h]` (normal cone of an interval).
fn interval_normal_cone(l: f64, h: f64) -> Polyline {
    let mut vertices = Vec::new();
    if l.is_finite() {
        vertices.push((l, 0.0));
    }
    if h.is_finite() {
        vertices.push((h, 0.0));
    }
    if vertices.is_empty() {
        vertices.push((0.0, 0.0));
    }
    Polyline {
        vertices,
        start_dir: if l.is_finite() { (0.0, -1.0) } else { (-1.0, 0.0) },
        end_dir: if h.is_finite() { (0.0, 1.0) } else { (1.0, 0.0) },
    }
}

/// The graph of `∂σ_[l,h]` is the transpose of the normal cone graph.
fn transpose(p: Polyline) -> Polyline {
    let sw = |(a, b): (f64, f64)| (b, a);
    Polyline {
        vertices: p.vertices.into_iter().map(sw).collect(),
        start_dir: sw(p.start_dir),
        end_dir: sw(p.end_dir),
    }
}

fn project_affine_graph(a: &Matrix, b: &[f64], x: &[f64], xs: &[f64]) -> Result<(Vector, Vector)> {
    // min ‖y − x‖² + ‖Ay + b − x*‖²  ⇒  (I + AᵀA) y = x + Aᵀ(x* − b)
    let n = x.len();
    let m = linalg::identity(n) + a.transpose() * a;
    let rhs = linalg::add(x, &linalg::mat_t_vec(a, &linalg::sub(xs, b)));
    let y = linalg::solve(&m, &rhs).ok_or_else(|| Error::SolverFailure {
        message: "graph projection system is singular".into(),
        best_value: f64::NAN,
    })?;
    let ys = linalg::add(&linalg::mat_vec(a, &y), b);
    Ok((y, ys))
}

fn project_subdifferential(f: &ConvexFunction, x: &[f64], xs: &[f64]) -> Result<(Vector, Vector)> {
    let n = x.len();
    let per_coordinate = |curve: &dyn Fn(usize) -> Polyline| {
        let mut y = vec![0.0; n];
        let mut ys = vec![0.0; n];
        for i in 0..n {
            let q = curve(i).project((x[i], xs[i]));
            y[i] = q.0;
            ys[i] = q.1;
        }
        (y, ys)
    };
    Ok(match f.kind() {
        FnKind::Quadratic { a, b, .. } => project_affine_graph(a, b, x, xs)?,
        FnKind::AbsNorm => per_coordinate(&|_| transpose(interval_normal_cone(-1.0, 1.0))),
        FnKind::BoxIndicator { lo, hi } => per_coordinate(&|i| interval_normal_cone(lo[i], hi[i])),
        FnKind::BoxSupport { lo, hi } => {
            per_coordinate(&|i| transpose(interval_normal_cone(lo[i], hi[i])))
        }
        FnKind::Separable(parts) => {
            let mut y = Vec::with_capacity(n);
            let mut ys = Vec::with_capacity(n);
            let mut at = 0;
            for p in parts {
                let d = p.dim();
                let (a, b) = project_subdifferential(p, &x[at..at + d], &xs[at..at + d])?;
                y.extend(a);
                ys.extend(b);
                at += d;
            }
            (y, ys)
        }
        FnKind::Translated {
            base, shift, tilt, ..
        } => {
            let (y, ys) = project_subdifferential(base, &linalg::sub(x, shift), &linalg::sub(xs, tilt))?;
            (linalg::add(&y, shift), linalg::add(&ys, tilt))
        }
        FnKind::Grid(_) | FnKind::GridConjugate(_) => {
            return Err(Error::Unsupported("graph projection for grid-sampled functions".into()))
        }
    })
}

impl MonotoneOperator {
    /// Nearest graph point to `p`: exact for the analytic kinds, the nearest
    /// stored pair for sampled graphs.
    pub fn project_to_graph(&self, p: &PrimalDualPoint) -> Result<PrimalDualPoint> {
        if p.dim() != self.dim() {
            return Err(Error::dims("projected point", self.dim(), p.dim()));
        }
        let (y, ys) = match self.kind() {
            OperatorKind::Affine { a, b } => project_affine_graph(a, b, &p.x, &p.xstar)?,
            OperatorKind::Rotation2d => {
                project_affine_graph(&MonotoneOperator::rotation_matrix(), &[0.0, 0.0], &p.x, &p.xstar)?
            }
            OperatorKind::Subdifferential(f) => project_subdifferential(f, &p.x, &p.xstar)?,
            OperatorKind::SampledGraph(pts) => {
                let best = pts
                    .iter()
                    .min_by(|a, b| a.distance(p).total_cmp(&b.distance(p)))
                    .expect("sampled graphs are nonempty");
                return Ok(best.clone());
            }
        };
        PrimalDualPoint::new(y, ys)
    }
}
