//! Closed forms of the Fitzpatrick function `φ_T` and of `σ_T` for the
//! operator catalogue.

use super::{Bifunction, ConstrainedQuadratic};
use crate::convexfn::{ConvexFunction, FnKind};
use crate::error::{Error, Result};
use crate::grid::PointCloud;
use crate::linalg::{self, Matrix, Vector};
use crate::operators::{MonotoneOperator, OperatorKind};

/// `φ_T` for `T(x) = Ax + b`.
///
/// With `S = (A + Aᵀ)/2` and `v = Aᵀx + x* − b`,
/// `φ(x, x*) = ⟨x, b⟩ + ¼ vᵀS⁺v` when `v ∈ range S`, `+∞` otherwise.
pub(crate) fn affine_fitzpatrick(a: &Matrix, b: &[f64]) -> Result<ConstrainedQuadratic> {
    let n = b.len();
    let s = linalg::symmetrize(a);
    let (sp, ker) = linalg::sym_pinv_and_kernel(&s);
    let mut m = Matrix::zeros(n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&a.transpose());
    m.view_mut((0, n), (n, n)).copy_from(&linalg::identity(n));
    let q = m.transpose() * &sp * &m * 0.5;
    let spb = linalg::mat_vec(&sp, b);
    let mut l = linalg::scale(&linalg::mat_t_vec(&m, &spb), -0.5);
    for i in 0..n {
        l[i] += b[i];
    }
    let k = 0.25 * linalg::dot(b, &spb);
    let c = ker.transpose() * &m;
    let d = linalg::mat_t_vec(&ker, b);
    ConstrainedQuadratic::new(q, l, k, c, d)
}

/// `σ_T = π + δ_T` for `T(x) = Ax + b`, already convex and closed since
/// `⟨x, Ax + b⟩` is convex on the graph.
pub(crate) fn affine_sigma(a: &Matrix, b: &[f64]) -> Result<ConstrainedQuadratic> {
    let n = b.len();
    let mut q = Matrix::zeros(2 * n, 2 * n);
    let mut c = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        q[(i, n + i)] = 1.0;
        q[(n + i, i)] = 1.0;
        c[(i, n + i)] = -1.0;
    }
    c.view_mut((0, 0), (n, n)).copy_from(a);
    ConstrainedQuadratic::new(q, vec![0.0; 2 * n], 0.0, c, linalg::scale(b, -1.0))
}

/// Which of the two extremal representations to build.
#[derive(Clone, Copy, PartialEq)]
enum Extreme {
    Smallest,
    Largest,
}

fn affine_extreme(a: &Matrix, b: &[f64], which: Extreme) -> Result<Bifunction> {
    let q = match which {
        Extreme::Smallest => affine_fitzpatrick(a, b)?,
        Extreme::Largest => affine_sigma(a, b)?,
    };
    Bifunction::quadratic(q)
}

fn subdifferential_extreme(f: &ConvexFunction, which: Extreme) -> Result<Bifunction> {
    match f.kind() {
        // ∂f is affine; the general affine formulas apply.
        FnKind::Quadratic { a, b, .. } => affine_extreme(a, b, which),
        // Coordinatewise these graphs are staircases, on which the
        // smallest and largest representations both reduce to f ⊕ f*.
        FnKind::AbsNorm | FnKind::BoxIndicator { .. } | FnKind::BoxSupport { .. } => {
            Bifunction::separable(f.clone())
        }
        FnKind::Separable(parts) => Bifunction::pair_sum(
            parts
                .iter()
                .map(|p| subdifferential_extreme(p, which))
                .collect::<Result<_>>()?,
        ),
        // ∂g(x) = ∂base(x − shift) + tilt, so the graph moves by
        // (shift, tilt) and both extremes translate by its negative.
        FnKind::Translated {
            base, shift, tilt, ..
        } => subdifferential_extreme(base, which)?
            .translate(&linalg::scale(shift, -1.0), &linalg::scale(tilt, -1.0)),
        FnKind::Grid(_) | FnKind::GridConjugate(_) => Err(Error::Unsupported(
            "no closed-form representation for subdifferentials of grid functions".into(),
        )),
    }
}

impl Bifunction {
    /// The Fitzpatrick function
    /// `φ_T(x, x*) = sup_{(y, y*) ∈ T} ⟨x, y*⟩ + ⟨y, x*⟩ − ⟨y, y*⟩`.
    ///
    /// Exact for analytic operators. For sampled graphs the supremum runs
    /// over the stored points and the result is flagged as a lower bound.
    pub fn fitzpatrick(t: &MonotoneOperator) -> Result<Bifunction> {
        match t.kind() {
            OperatorKind::Affine { a, b } => affine_extreme(a, b, Extreme::Smallest),
            OperatorKind::Rotation2d => {
                affine_extreme(&MonotoneOperator::rotation_matrix(), &[0.0, 0.0], Extreme::Smallest)
            }
            OperatorKind::Subdifferential(f) => subdifferential_extreme(f, Extreme::Smallest),
            OperatorKind::SampledGraph(pts) => {
                let slopes: Vec<Vector> = pts.iter().map(|p| p.transposed().stacked()).collect();
                let offsets = pts.iter().map(|p| -p.duality_product()).collect();
                Ok(Bifunction::max_affine(slopes, offsets)?.mark_lower_bound())
            }
        }
    }

    /// `σ_T = clconv(π + δ_T)`, the largest member of the Fitzpatrick
    /// family. For sampled graphs this is the lower convex envelope of the
    /// points `((y, y*), ⟨y, y*⟩)`.
    pub fn sigma(t: &MonotoneOperator) -> Result<Bifunction> {
        match t.kind() {
            OperatorKind::Affine { a, b } => affine_extreme(a, b, Extreme::Largest),
            OperatorKind::Rotation2d => {
                affine_extreme(&MonotoneOperator::rotation_matrix(), &[0.0, 0.0], Extreme::Largest)
            }
            OperatorKind::Subdifferential(f) => subdifferential_extreme(f, Extreme::Largest),
            OperatorKind::SampledGraph(pts) => Bifunction::hull(PointCloud::new(
                pts.iter().map(|p| p.stacked()).collect(),
                pts.iter().map(|p| p.duality_product()).collect(),
            )?),
        }
    }
}

/// A catalogue function as a constrained quadratic, when it is one.
pub(crate) fn function_as_quadratic(f: &ConvexFunction) -> Result<ConstrainedQuadratic> {
    let n = f.dim();
    match f.kind() {
        FnKind::Quadratic { a, b, c } => ConstrainedQuadratic::unconstrained(a.clone(), b.clone(), *c),
        FnKind::BoxIndicator { lo, hi } if lo == hi => ConstrainedQuadratic::new(
            Matrix::zeros(n, n),
            vec![0.0; n],
            0.0,
            linalg::identity(n),
            lo.clone(),
        ),
        FnKind::Separable(parts) => {
            let mut acc: Option<ConstrainedQuadratic> = None;
            for p in parts {
                let q = function_as_quadratic(p)?;
                acc = Some(match acc {
                    None => q,
                    Some(a) => ConstrainedQuadratic::direct_sum(&a, &q)?,
                });
            }
            acc.ok_or_else(|| Error::InvalidParameter("empty separable sum".into()))
        }
        FnKind::Translated {
            base,
            shift,
            tilt,
            offset,
        } => function_as_quadratic(base)?.precompose(
            &linalg::identity(n),
            &linalg::scale(shift, -1.0),
            tilt,
            *offset,
        ),
        _ => Err(Error::Unsupported("function is not a constrained quadratic".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::PrimalDualPoint;

    fn at(h: &Bifunction, x: f64, s: f64) -> f64 {
        h.eval_w(&[x, s]).unwrap()
    }

    /// `sup_y ⟨x, T y⟩ + ⟨y, x*⟩ − ⟨y, T y⟩` over a fine grid of `y`.
    fn brute_phi(t: impl Fn(f64) -> Vec<f64>, x: f64, s: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in -40_000..=40_000 {
            let y = i as f64 * 1e-3;
            for ys in t(y) {
                best = best.max(x * ys + y * s - y * ys);
            }
        }
        best
    }

    #[test]
    fn identity_fitzpatrick_matches_brute_force() {
        let h = Bifunction::fitzpatrick(&MonotoneOperator::identity(1).unwrap()).unwrap();
        assert!((at(&h, 0.0, 1.0) - 0.25).abs() < 1e-12);
        assert!((at(&h, 1.0, 1.0) - 1.0).abs() < 1e-12);
        for (x, s) in [(0.3, -1.2), (2.0, 0.5), (-1.0, -1.0)] {
            let b = brute_phi(|y| vec![y], x, s);
            assert!((at(&h, x, s) - b).abs() < 1e-5, "{x} {s}");
        }
    }

    #[test]
    fn zero_operator_fitzpatrick() {
        let t = MonotoneOperator::affine(Matrix::zeros(1, 1), vec![0.0]).unwrap();
        let h = Bifunction::fitzpatrick(&t).unwrap();
        assert_eq!(at(&h, 3.0, 0.0), 0.0);
        assert_eq!(at(&h, 3.0, 0.1), f64::INFINITY);
    }

    #[test]
    fn shifted_identity_fitzpatrick() {
        let t = MonotoneOperator::affine(linalg::identity(1), vec![1.0]).unwrap();
        let h = Bifunction::fitzpatrick(&t).unwrap();
        for (x, s) in [(0.0, 0.0), (1.0, -0.5), (-1.5, 2.0)] {
            let b = brute_phi(|y| vec![y + 1.0], x, s);
            assert!((at(&h, x, s) - b).abs() < 1e-5);
        }
    }

    #[test]
    fn abs_fitzpatrick_matches_brute_force() {
        let f = ConvexFunction::abs_norm(1).unwrap();
        let h = Bifunction::fitzpatrick(&MonotoneOperator::subdifferential(f).unwrap()).unwrap();
        let graph = |y: f64| {
            if y > 0.0 {
                vec![1.0]
            } else if y < 0.0 {
                vec![-1.0]
            } else {
                (-10..=10).map(|k| k as f64 / 10.0).collect()
            }
        };
        for (x, s) in [(0.5, 0.5), (-1.0, 0.2), (0.0, -1.0)] {
            let b = brute_phi(graph, x, s);
            assert!((at(&h, x, s) - b).abs() < 1e-9, "{x} {s}: {} vs {b}", at(&h, x, s));
        }
        assert_eq!(at(&h, 0.0, 1.5), f64::INFINITY);
    }

    #[test]
    fn translated_quadratic_uses_shifted_graph() {
        // g(x) = ½(x − 1)² + 2x has ∂g(x) = x + 1.
        let g = ConvexFunction::translated(ConvexFunction::half_square(1).unwrap(), vec![1.0], vec![2.0], 0.0)
            .unwrap();
        let h = Bifunction::fitzpatrick(&MonotoneOperator::subdifferential(g).unwrap()).unwrap();
        for (x, s) in [(0.0, 0.0), (1.0, -0.5), (-1.5, 2.0)] {
            let b = brute_phi(|y| vec![y + 1.0], x, s);
            assert!((at(&h, x, s) - b).abs() < 1e-5);
        }
    }

    #[test]
    fn rotation_fitzpatrick_is_graph_indicator() {
        let h = Bifunction::fitzpatrick(&MonotoneOperator::rotation2d()).unwrap();
        assert_eq!(h.eval_w(&[1.0, 2.0, -2.0, 1.0]).unwrap(), 0.0);
        assert_eq!(h.eval_w(&[1.0, 2.0, -2.0, 1.1]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn sigma_examples() {
        let id = MonotoneOperator::identity(1).unwrap();
        let s = Bifunction::sigma(&id).unwrap();
        assert_eq!(at(&s, 1.0, 1.0), 1.0);
        assert_eq!(at(&s, 0.0, 1.0), f64::INFINITY);
        let t = MonotoneOperator::sampled(vec![PrimalDualPoint::zero(1)]).unwrap();
        let s = Bifunction::sigma(&t).unwrap();
        assert_eq!(at(&s, 0.0, 0.0), 0.0);
        assert_eq!(at(&s, 0.0, 0.5), f64::INFINITY);
    }

    #[test]
    fn sampled_fitzpatrick_is_flagged() {
        let pts = vec![
            PrimalDualPoint::new(vec![0.0], vec![0.0]).unwrap(),
            PrimalDualPoint::new(vec![1.0], vec![1.0]).unwrap(),
        ];
        let h = Bifunction::fitzpatrick(&MonotoneOperator::sampled(pts).unwrap()).unwrap();
        assert!(h.is_lower_bound());
        assert_eq!(at(&h, 1.0, 1.0), 1.0);
    }
}
