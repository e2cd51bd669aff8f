use serde::Serialize;

use super::point::{DualSet, PrimalDualPoint};
use crate::convexfn::ConvexFunction;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{self, Matrix, Vector};
use crate::representations::Bifunction;
use crate::tolerance::{TolClass, TOL_MONO_SAMPLED, TOL_X};

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    /// `x ↦ Ax + b` with `A + Aᵀ ⪰ 0`.
    Affine { a: Matrix, b: Vector },
    /// `∂f` for a closed-form catalogue function.
    Subdifferential(ConvexFunction),
    /// `(x₁, x₂) ↦ (−x₂, x₁)`.
    Rotation2d,
    /// A finite monotone set of pairs.
    SampledGraph(Vec<PrimalDualPoint>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneOperator {
    dim: usize,
    kind: OperatorKind,
}

/// Result of a pairwise monotonicity test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub monotone: bool,
    /// First pair `(i, j, ⟨x_i − x_j, x*_i − x*_j⟩)` below `−tol`.
    pub witness: Option<(usize, usize, f64)>,
    #[serde(serialize_with = "crate::extreal::serialize_f64")]
    pub min_product: f64,
}

/// Checks `⟨x − y, x* − y*⟩ ≥ −tol` over all pairs of `points`.
pub fn monotonicity_check(points: &[PrimalDualPoint], tol: f64) -> Result<MonotonicityReport> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidParameter("monotonicity check needs at least one point".into()));
    };
    if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
        return Err(Error::dims("graph point", first.dim(), bad.dim()));
    }
    let mut min_product = f64::INFINITY;
    let mut witness = None;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].sub(&points[j]);
            let prod = d.duality_product();
            min_product = min_product.min(prod);
            if witness.is_none() && prod < -tol {
                witness = Some((i, j, prod));
            }
        }
    }
    Ok(MonotonicityReport {
        monotone: witness.is_none(),
        witness,
        min_product,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnlargementReport {
    /// Whether the point lies in the ε-enlargement.
    pub inside: bool,
    /// `inf` over the graph of `⟨x − y, x* − y*⟩`.
    pub inf: ExtReal,
    /// Graph point attaining the infimum (sampled graphs only).
    pub witness: Option<PrimalDualPoint>,
    pub tol_class: TolClass,
}

/// Tests `⟨x − y, x* − y*⟩ ≥ −ε` against every graph point `(y, y*)`.
///
/// For analytic kinds the infimum equals `⟨x, x*⟩ − φ_T(x, x*)`, computed
/// from the closed-form Fitzpatrick function; for sampled graphs it is a
/// minimum over the samples.
pub fn eps_enlargement_test(
    t: &MonotoneOperator,
    p: &PrimalDualPoint,
    eps: f64,
) -> Result<EnlargementReport> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be nonnegative, got {eps}")));
    }
    if p.dim() != t.dim {
        return Err(Error::dims("enlargement point", t.dim, p.dim()));
    }
    let class = t.tol_class();
    let (inf, witness) = match &t.kind {
        OperatorKind::SampledGraph(pts) => {
            let (k, v) = pts
                .iter()
                .map(|y| p.sub(y).duality_product())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("sampled graphs are nonempty");
            (ExtReal::from(v), Some(pts[k].clone()))
        }
        _ => {
            let phi = Bifunction::fitzpatrick(t)?.eval(p)?;
            ((-phi).add_finite(p.duality_product()), None)
        }
    };
    let inside = inf.is_finite() && inf.value() >= -eps - class.mono();
    Ok(EnlargementReport {
        inside,
        inf,
        witness,
        tol_class: class,
    })
}

impl MonotoneOperator {
    pub fn affine(a: Matrix, b: Vector) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::dims("affine operator matrix", n, a.nrows()));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("affine coefficients must be finite".into()));
        }
        linalg::check_psd(&a)?;
        Ok(MonotoneOperator {
            dim: n,
            kind: OperatorKind::Affine { a, b },
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        MonotoneOperator::affine(linalg::identity(n), vec![0.0; n])
    }

    pub fn subdifferential(f: ConvexFunction) -> Result<Self> {
        if !f.is_catalogue() {
            return Err(Error::Unsupported(
                "subdifferential operators need a closed-form catalogue function".into(),
            ));
        }
        Ok(MonotoneOperator {
            dim: f.dim(),
            kind: OperatorKind::Subdifferential(f),
        })
    }

    pub fn rotation2d() -> Self {
        MonotoneOperator {
            dim: 2,
            kind: OperatorKind::Rotation2d,
        }
    }

    pub fn sampled(points: Vec<PrimalDualPoint>) -> Result<Self> {
        let report = monotonicity_check(&points, TOL_MONO_SAMPLED)?;
        if let Some((first, second, product)) = report.witness {
            return Err(Error::NotMonotone {
                first,
                second,
                product,
            });
        }
        Ok(MonotoneOperator {
            dim: points[0].dim(),
            kind: OperatorKind::SampledGraph(points),
        })
    }

    /// The graph of `self` sampled at the given primal points (one dual
    /// value per point, the nearest to the origin in the value set).
    pub fn sample_graph(&self, xs: &[Vector]) -> Result<Vec<PrimalDualPoint>> {
        let zero = vec![0.0; self.dim];
        let mut out = Vec::new();
        for x in xs {
            if let Some(s) = self.eval(x)?.nearest(&zero) {
                out.push(PrimalDualPoint::new(x.clone(), s)?);
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn tol_class(&self) -> TolClass {
        match &self.kind {
            OperatorKind::SampledGraph(_) => TolClass::Grid,
            _ => TolClass::ClosedForm,
        }
    }

    /// The matrix `J` of the planar rotation.
    pub fn rotation_matrix() -> Matrix {
        linalg::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).expect("static shape")
    }

    /// `(A, b)` when the operator is single-valued affine.
    pub fn as_affine(&self) -> Option<(Matrix, Vector)> {
        match &self.kind {
            OperatorKind::Affine { a, b } => Some((a.clone(), b.clone())),
            OperatorKind::Rotation2d => Some((Self::rotation_matrix(), vec![0.0; 2])),
            _ => None,
        }
    }

    /// `T(x)` as a set.
    pub fn eval(&self, x: &[f64]) -> Result<DualSet> {
        if x.len() != self.dim {
            return Err(Error::dims("operator argument", self.dim, x.len()));
        }
        Ok(match &self.kind {
            OperatorKind::Affine { a, b } => DualSet::point(linalg::add(&linalg::mat_vec(a, x), b)),
            OperatorKind::Rotation2d => DualSet::point(vec![-x[1], x[0]]),
            OperatorKind::Subdifferential(f) => f.subdifferential(x)?,
            OperatorKind::SampledGraph(pts) => DualSet::Finite(
                pts.iter()
                    .filter(|p| linalg::norm_inf(&linalg::sub(&p.x, x)) <= TOL_X)
                    .map(|p| p.xstar.clone())
                    .collect(),
            ),
        })
    }

    /// Whether `p` lies on the graph within `tol` (dual coordinates).
    pub fn graph_contains(&self, p: &PrimalDualPoint, tol: f64) -> Result<bool> {
        Ok(self.eval(&p.x)?.contains(&p.xstar, tol))
    }
}
