//! Convex functions `h(x, x*)` on `R^n × R^n` representing monotone
//! operators, and the checks that relate them to the duality product.
//!
//! Internally a pair is the stacked vector `w = (x, x*) ∈ R^{2n}`. The
//! conjugate `h*` is always stored with the canonical signature
//! `h*(x*, x**)`: its first block pairs with `x`, its second with `x*`.
//! [`Bifunction::transposed`] is the explicit adapter for the swapped
//! reading `(x*, x) ↦ h(x, x*)`.

mod catalogue;
mod checks;
mod cq;

use std::sync::Arc;

pub use checks::{
    bifunction_conjugate, check_dual_condition, convex_closure, family_membership,
    fitzpatrick_eval, graph_conjugate_equality, sigma_eval, translate,
    translation_conjugate_check, translation_gap_deviation, ConditionReport, GapWitness,
    GraphConjugateReport, MembershipReport, TestSet, TranslationReport,
};
pub use cq::ConstrainedQuadratic;

use crate::convexfn::ConvexFunction;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{GridFn, PointCloud};
use crate::linalg::{self, Vector};
use crate::operators::PrimalDualPoint;
use crate::solver::epi;
use crate::tolerance::TolClass;

#[derive(Debug, Clone, PartialEq)]
pub enum BiKind {
    /// `f(x) + g(x*)`; `conjugate_pair` records that `g = f*`.
    Separable {
        f: ConvexFunction,
        g: ConvexFunction,
        conjugate_pair: bool,
    },
    /// A quadratic in `w`, possibly restricted to an affine subspace.
    Quadratic(Arc<ConstrainedQuadratic>),
    /// The conjugate of a constrained quadratic.
    QuadraticConjugate(Arc<ConstrainedQuadratic>),
    /// `max_j ⟨g_j, w⟩ + e_j`.
    MaxAffine {
        slopes: Arc<Vec<Vector>>,
        offsets: Arc<Vec<f64>>,
        /// Box of arguments where this function, when it is a grid
        /// conjugate, matches the conjugate of the untruncated function.
        valid: Option<Vec<(f64, f64)>>,
        /// The grid whose conjugate this is, if any.
        source: Option<Arc<GridFn>>,
    },
    /// Lower convex envelope of finitely many points.
    Hull(Arc<PointCloud>),
    /// Lower convex envelope of samples on a product grid in `R^{2n}`.
    Grid(Arc<GridFn>),
    /// `h(x + z, x* + z*) − ⟨x, z*⟩ − ⟨z, x*⟩ − ⟨z, z*⟩`.
    Translated {
        base: Bifunction,
        z: Vector,
        zstar: Vector,
    },
    /// `(x, x*) ↦ base(x*, x)`.
    Transposed(Bifunction),
    /// `(x, x*) ↦ base(x / s, s x*)`.
    Scaled { base: Bifunction, s: f64 },
    /// `Σ_i h_i(x_(i), x*_(i))` over consecutive coordinate blocks.
    PairSum(Vec<Bifunction>),
}

/// A convex function of a primal-dual pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Bifunction {
    dim: usize,
    kind: Arc<BiKind>,
    lower_bound: bool,
}

impl Bifunction {
    fn from_kind(dim: usize, kind: BiKind) -> Self {
        Bifunction {
            dim,
            kind: Arc::new(kind),
            lower_bound: false,
        }
    }

    /// `f ⊕ f*`, which represents `∂f`.
    pub fn separable(f: ConvexFunction) -> Result<Self> {
        let g = f.conjugate()?;
        Ok(Bifunction::from_kind(
            f.dim(),
            BiKind::Separable {
                f,
                g,
                conjugate_pair: true,
            },
        ))
    }

    /// `f(x) + g(x*)` for unrelated `f` and `g`.
    pub fn split(f: ConvexFunction, g: ConvexFunction) -> Result<Self> {
        if f.dim() != g.dim() {
            return Err(Error::dims("split bifunction", f.dim(), g.dim()));
        }
        Ok(Bifunction::from_kind(
            f.dim(),
            BiKind::Separable {
                f,
                g,
                conjugate_pair: false,
            },
        ))
    }

    pub fn quadratic(q: ConstrainedQuadratic) -> Result<Self> {
        if q.dim() % 2 != 0 || q.dim() == 0 {
            return Err(Error::InvalidParameter(
                "a bifunction quadratic acts on R^n × R^n (even dimension)".into(),
            ));
        }
        Ok(Bifunction::from_kind(q.dim() / 2, BiKind::Quadratic(Arc::new(q))))
    }

    /// `½ wᵀQw + ⟨l, w⟩ + k` on `w = (x, x*)`; `Q` need not be positive
    /// semidefinite (convexity is then reported by the checks).
    pub fn quadratic_form(q: linalg::Matrix, l: Vector, k: f64) -> Result<Self> {
        Bifunction::quadratic(ConstrainedQuadratic::unconstrained(q, l, k)?)
    }

    /// The duality product `⟨x, x*⟩ − shift`.
    pub fn shifted_pairing(n: usize, shift: f64) -> Result<Self> {
        let mut q = linalg::Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            q[(i, n + i)] = 1.0;
            q[(n + i, i)] = 1.0;
        }
        Bifunction::quadratic_form(q, vec![0.0; 2 * n], -shift)
    }

    /// The lower convex envelope of grid samples over a box in `R^{2n}`.
    pub fn grid(g: GridFn) -> Result<Self> {
        if g.dim() % 2 != 0 {
            return Err(Error::InvalidParameter(
                "a bifunction grid lives in R^n × R^n (even dimension)".into(),
            ));
        }
        Ok(Bifunction::from_kind(g.dim() / 2, BiKind::Grid(Arc::new(g))))
    }

    pub fn hull(cloud: PointCloud) -> Result<Self> {
        if cloud.dim() % 2 != 0 {
            return Err(Error::InvalidParameter("point cloud must live in R^n × R^n".into()));
        }
        Ok(Bifunction::from_kind(cloud.dim() / 2, BiKind::Hull(Arc::new(cloud))))
    }

    pub fn max_affine(slopes: Vec<Vector>, offsets: Vec<f64>) -> Result<Self> {
        Self::max_affine_with(slopes, offsets, None, None)
    }

    fn max_affine_with(
        slopes: Vec<Vector>,
        offsets: Vec<f64>,
        valid: Option<Vec<(f64, f64)>>,
        source: Option<Arc<GridFn>>,
    ) -> Result<Self> {
        let Some(first) = slopes.first() else {
            return Err(Error::Improper("max of no affine functions".into()));
        };
        let d = first.len();
        if d % 2 != 0 || d == 0 {
            return Err(Error::InvalidParameter("slopes must live in R^n × R^n".into()));
        }
        if offsets.len() != slopes.len() {
            return Err(Error::dims("max-affine offsets", slopes.len(), offsets.len()));
        }
        if slopes.iter().any(|s| s.len() != d) {
            return Err(Error::InvalidParameter("slopes must share one dimension".into()));
        }
        Ok(Bifunction::from_kind(
            d / 2,
            BiKind::MaxAffine {
                slopes: Arc::new(slopes),
                offsets: Arc::new(offsets),
                valid,
                source,
            },
        ))
    }

    /// `h_{(z, z*)}`; see [`BiKind::Translated`].
    pub fn translate(&self, z: &[f64], zstar: &[f64]) -> Result<Self> {
        if z.len() != self.dim || zstar.len() != self.dim {
            return Err(Error::dims("translation vector", self.dim, z.len().max(zstar.len())));
        }
        if z.iter().chain(zstar).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("translation must be finite".into()));
        }
        Ok(Bifunction {
            dim: self.dim,
            kind: Arc::new(BiKind::Translated {
                base: self.clone(),
                z: z.to_vec(),
                zstar: zstar.to_vec(),
            }),
            lower_bound: self.lower_bound,
        })
    }

    /// `(x, x*) ↦ h(x*, x)`.
    pub fn transposed(&self) -> Self {
        Bifunction {
            dim: self.dim,
            kind: Arc::new(BiKind::Transposed(self.clone())),
            lower_bound: self.lower_bound,
        }
    }

    /// `(u, u*) ↦ h(u / s, s u*)`: `h` read in coordinates where the primal
    /// norm is scaled by `s` and the dual norm by `1/s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {s}")));
        }
        Ok(Bifunction {
            dim: self.dim,
            kind: Arc::new(BiKind::Scaled {
                base: self.clone(),
                s,
            }),
            lower_bound: self.lower_bound,
        })
    }

    pub fn pair_sum(parts: Vec<Bifunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("pair sum needs at least one part".into()));
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        let lower_bound = parts.iter().any(|p| p.lower_bound);
        Ok(Bifunction {
            dim,
            kind: Arc::new(BiKind::PairSum(parts)),
            lower_bound,
        })
    }

    pub(crate) fn mark_lower_bound(mut self) -> Self {
        self.lower_bound = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BiKind {
        &self.kind
    }

    /// Whether values only bound the represented function from below
    /// (Fitzpatrick functions of sampled graphs).
    pub fn is_lower_bound(&self) -> bool {
        self.lower_bound
    }

    pub fn tol_class(&self) -> TolClass {
        match self.kind.as_ref() {
            BiKind::Separable { f, g, .. } => f.tol_class().join(g.tol_class()),
            BiKind::Quadratic(_) | BiKind::QuadraticConjugate(_) => TolClass::ClosedForm,
            BiKind::MaxAffine { .. } | BiKind::Hull(_) | BiKind::Grid(_) => TolClass::Grid,
            BiKind::Translated { base, .. } | BiKind::Transposed(base) | BiKind::Scaled { base, .. } => {
                base.tol_class()
            }
            BiKind::PairSum(parts) => parts
                .iter()
                .fold(TolClass::ClosedForm, |c, p| c.join(p.tol_class())),
        }
    }

    /// Whether the kind is convex by construction (envelopes and maxima of
    /// affine functions), so that sampled convexity tests are redundant.
    pub fn convex_by_construction(&self) -> bool {
        match self.kind.as_ref() {
            BiKind::MaxAffine { .. } | BiKind::Hull(_) | BiKind::Grid(_) => true,
            BiKind::Separable { .. } | BiKind::QuadraticConjugate(_) => true,
            BiKind::Quadratic(q) => q.is_convex(),
            BiKind::Translated { base, .. } | BiKind::Transposed(base) | BiKind::Scaled { base, .. } => {
                base.convex_by_construction()
            }
            BiKind::PairSum(parts) => parts.iter().all(Bifunction::convex_by_construction),
        }
    }

    pub fn eval(&self, p: &PrimalDualPoint) -> Result<ExtReal> {
        if p.dim() != self.dim {
            return Err(Error::dims("bifunction argument", self.dim, p.dim()));
        }
        Ok(ExtReal::from(self.eval_w(&p.stacked())?))
    }

    /// Evaluation on the stacked vector `(x, x*)`.
    pub fn eval_w(&self, w: &[f64]) -> Result<f64> {
        let n = self.dim;
        if w.len() != 2 * n {
            return Err(Error::dims("bifunction argument", 2 * n, w.len()));
        }
        Ok(match self.kind.as_ref() {
            BiKind::Separable { f, g, .. } => {
                let a = f.eval(&w[..n])?.value();
                if a == f64::INFINITY {
                    return Ok(a);
                }
                a + g.eval(&w[n..])?.value()
            }
            BiKind::Quadratic(q) => q.eval(w),
            BiKind::QuadraticConjugate(q) => q.eval_conjugate(w),
            BiKind::MaxAffine { slopes, offsets, .. } => slopes
                .iter()
                .zip(offsets.iter())
                .map(|(g, e)| linalg::dot(g, w) + e)
                .fold(f64::NEG_INFINITY, f64::max),
            BiKind::Hull(c) => c.eval(w)?,
            BiKind::Grid(g) => g.eval(w)?,
            BiKind::Translated { base, z, zstar } => {
                let mut shifted = w.to_vec();
                for i in 0..n {
                    shifted[i] += z[i];
                    shifted[n + i] += zstar[i];
                }
                let v = base.eval_w(&shifted)?;
                if v == f64::INFINITY {
                    return Ok(v);
                }
                v - linalg::dot(&w[..n], zstar) - linalg::dot(z, &w[n..]) - linalg::dot(z, zstar)
            }
            BiKind::Transposed(base) => base.eval_w(&swap_blocks(w))?,
            BiKind::Scaled { base, s } => {
                let mut u = w.to_vec();
                for i in 0..n {
                    u[i] /= s;
                    u[n + i] *= s;
                }
                base.eval_w(&u)?
            }
            BiKind::PairSum(parts) => {
                let mut total = 0.0;
                let mut at = 0;
                for p in parts {
                    let v = p.eval_w(&gather(w, n, at, p.dim))?;
                    if v == f64::INFINITY {
                        return Ok(v);
                    }
                    total += v;
                    at += p.dim;
                }
                total
            }
        })
    }

    /// The conjugate `h*(x*, x**) = sup ⟨x, x*⟩ + ⟨x*, x**⟩ − h(x, x*)`,
    /// as a bifunction on the stacked pair `(x*, x**)`.
    pub fn conjugate(&self) -> Result<Bifunction> {
        let n = self.dim;
        let h = match self.kind.as_ref() {
            BiKind::Separable {
                f,
                g,
                conjugate_pair: true,
            } => Bifunction::from_kind(
                n,
                BiKind::Separable {
                    f: g.clone(),
                    g: f.clone(),
                    conjugate_pair: true,
                },
            ),
            BiKind::Separable { f, g, .. } => Bifunction::split(f.conjugate()?, g.conjugate()?)?,
            BiKind::Quadratic(q) => Bifunction::from_kind(n, BiKind::QuadraticConjugate(q.clone())),
            BiKind::QuadraticConjugate(q) => {
                if !q.is_convex() {
                    return Err(Error::Improper(
                        "conjugate of an identically +inf function".into(),
                    ));
                }
                Bifunction::from_kind(n, BiKind::Quadratic(q.clone()))
            }
            BiKind::MaxAffine {
                slopes,
                offsets,
                source,
                ..
            } => match source {
                Some(g) => Bifunction::from_kind(n, BiKind::Grid(g.clone())),
                None => Bifunction::hull(PointCloud::new(
                    slopes.as_ref().clone(),
                    offsets.iter().map(|e| -e).collect(),
                )?)?,
            },
            BiKind::Hull(c) => Bifunction::max_affine(
                c.points().to_vec(),
                c.values().iter().map(|v| -v).collect(),
            )?,
            BiKind::Grid(g) => {
                let (pts, vals) = g.finite_nodes();
                Bifunction::max_affine_with(
                    pts.to_vec(),
                    vals.iter().map(|v| -v).collect(),
                    Some(g.slope_box()),
                    Some(g.clone()),
                )?
            }
            BiKind::Translated { base, z, zstar } => base.conjugate()?.translate(zstar, z)?,
            BiKind::Transposed(base) => base.conjugate()?.transposed(),
            BiKind::Scaled { base, s } => base.conjugate()?.scaled(1.0 / s)?,
            BiKind::PairSum(parts) => Bifunction::pair_sum(
                parts
                    .iter()
                    .map(Bifunction::conjugate)
                    .collect::<Result<_>>()?,
            )?,
        };
        Ok(h)
    }

    /// Box of stacked arguments where a grid-backed function matches its
    /// untruncated counterpart; `None` when unrestricted.
    pub fn valid_region(&self) -> Option<Vec<(f64, f64)>> {
        let n = self.dim;
        let full = (f64::NEG_INFINITY, f64::INFINITY);
        match self.kind.as_ref() {
            BiKind::MaxAffine { valid, .. } => valid.clone(),
            BiKind::Separable { f, g, .. } => {
                let a = f.valid_slopes();
                let b = g.valid_slopes();
                if a.is_none() && b.is_none() {
                    return None;
                }
                let mut out = a.unwrap_or_else(|| vec![full; n]);
                out.extend(b.unwrap_or_else(|| vec![full; n]));
                Some(out)
            }
            BiKind::Translated { base, z, zstar } => base.valid_region().map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(i, &(l, h))| {
                        let sh = if i < n { z[i] } else { zstar[i - n] };
                        (l - sh, h - sh)
                    })
                    .collect()
            }),
            BiKind::Transposed(base) => base.valid_region().map(|r| swap_blocks_pairs(&r)),
            BiKind::Scaled { base, s } => base.valid_region().map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(i, &(l, h))| if i < n { (l * s, h * s) } else { (l / s, h / s) })
                    .collect()
            }),
            BiKind::PairSum(parts) => {
                if parts.iter().all(|p| p.valid_region().is_none()) {
                    return None;
                }
                let mut out = vec![full; 2 * n];
                let mut at = 0;
                for p in parts {
                    let r = p.valid_region().unwrap_or_else(|| vec![full; 2 * p.dim]);
                    for i in 0..p.dim {
                        out[at + i] = r[i];
                        out[n + at + i] = r[p.dim + i];
                    }
                    at += p.dim;
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Whether the stacked argument lies in [`valid_region`](Self::valid_region).
    pub fn is_valid_at(&self, w: &[f64]) -> bool {
        match self.valid_region() {
            None => true,
            Some(r) => w
                .iter()
                .zip(&r)
                .all(|(v, (l, h))| *v >= l - 1e-12 && *v <= h + 1e-12),
        }
    }

    /// `argmin_w h(w) + ½ Σ m_i (w_i − v_i)²` on stacked vectors.
    pub fn prox(&self, v: &[f64], m: &[f64]) -> Result<Vector> {
        let n = self.dim;
        if v.len() != 2 * n || m.len() != 2 * n {
            return Err(Error::dims("prox center", 2 * n, v.len()));
        }
        match self.kind.as_ref() {
            BiKind::Separable { f, g, .. } => {
                let mut out = f.prox(&v[..n], &m[..n])?;
                out.extend(g.prox(&v[n..], &m[n..])?);
                Ok(out)
            }
            BiKind::Quadratic(q) => q.prox(v, m),
            BiKind::MaxAffine { slopes, offsets, .. } => {
                Ok(epi::prox_max_affine(slopes, offsets, v, m)?.point)
            }
            BiKind::QuadraticConjugate(_) | BiKind::Hull(_) | BiKind::Grid(_) => {
                // Moreau: prox_h^M(v) = v − M⁻¹ prox_{h*}^{M⁻¹}(M v).
                let conj = self.conjugate()?;
                let mv: Vector = v.iter().zip(m).map(|(a, b)| a * b).collect();
                let minv: Vector = m.iter().map(|x| 1.0 / x).collect();
                let s = conj.prox(&mv, &minv)?;
                Ok((0..2 * n).map(|i| v[i] - s[i] / m[i]).collect())
            }
            BiKind::Translated { base, z, zstar } => {
                let mut c = v.to_vec();
                for i in 0..n {
                    c[i] += z[i] + zstar[i] / m[i];
                    c[n + i] += zstar[i] + z[i] / m[n + i];
                }
                let mut u = base.prox(&c, m)?;
                for i in 0..n {
                    u[i] -= z[i];
                    u[n + i] -= zstar[i];
                }
                Ok(u)
            }
            BiKind::Transposed(base) => {
                let u = base.prox(&swap_blocks(v), &swap_blocks(m))?;
                Ok(swap_blocks(&u))
            }
            BiKind::Scaled { base, s } => {
                let d: Vector = (0..2 * n).map(|i| if i < n { 1.0 / s } else { *s }).collect();
                let dv: Vector = v.iter().zip(&d).map(|(a, b)| a * b).collect();
                let dm: Vector = m.iter().zip(&d).map(|(a, b)| a / (b * b)).collect();
                let w = base.prox(&dv, &dm)?;
                Ok(w.iter().zip(&d).map(|(a, b)| a / b).collect())
            }
            BiKind::PairSum(parts) => {
                let mut out = vec![0.0; 2 * n];
                let mut at = 0;
                for p in parts {
                    let u = p.prox(&gather(v, n, at, p.dim), &gather(m, n, at, p.dim))?;
                    for i in 0..p.dim {
                        out[at + i] = u[i];
                        out[n + at + i] = u[p.dim + i];
                    }
                    at += p.dim;
                }
                Ok(out)
            }
        }
    }

    /// Rewrites the function as a single constrained quadratic when every
    /// component is quadratic (or a point indicator).
    pub fn to_quadratic(&self) -> Result<ConstrainedQuadratic> {
        let n = self.dim;
        let unsupported = || Error::Unsupported("bifunction is not a constrained quadratic".into());
        match self.kind.as_ref() {
            BiKind::Quadratic(q) => Ok(q.as_ref().clone()),
            BiKind::Separable { f, g, .. } => ConstrainedQuadratic::direct_sum(
                &catalogue::function_as_quadratic(f)?,
                &catalogue::function_as_quadratic(g)?,
            ),
            BiKind::Translated { base, z, zstar } => {
                let q = base.to_quadratic()?;
                let mut t = z.clone();
                t.extend_from_slice(zstar);
                let mut a = zstar.clone();
                a.extend_from_slice(z);
                let a = linalg::scale(&a, -1.0);
                q.precompose(&linalg::identity(2 * n), &t, &a, -linalg::dot(z, zstar))
            }
            BiKind::Transposed(base) => {
                let q = base.to_quadratic()?;
                q.precompose(&swap_matrix(n), &vec![0.0; 2 * n], &vec![0.0; 2 * n], 0.0)
            }
            BiKind::Scaled { base, s } => {
                let q = base.to_quadratic()?;
                let d = linalg::Matrix::from_diagonal(&nalgebra::DVector::from_fn(2 * n, |i, _| {
                    if i < n {
                        1.0 / s
                    } else {
                        *s
                    }
                }));
                q.precompose(&d, &vec![0.0; 2 * n], &vec![0.0; 2 * n], 0.0)
            }
            BiKind::PairSum(parts) => {
                // Direct sum in block order (x₁, x₁*, x₂, x₂*, …), then permute
                // to (x, x*).
                let mut acc: Option<ConstrainedQuadratic> = None;
                for p in parts {
                    let q = p.to_quadratic()?;
                    acc = Some(match acc {
                        None => q,
                        Some(a) => ConstrainedQuadratic::direct_sum(&a, &q)?,
                    });
                }
                let q = acc.ok_or_else(unsupported)?;
                let mut perm = linalg::Matrix::zeros(2 * n, 2 * n);
                let mut at = 0;
                let mut row = 0;
                for p in parts {
                    for i in 0..p.dim {
                        perm[(row + i, at + i)] = 1.0;
                        perm[(row + p.dim + i, n + at + i)] = 1.0;
                    }
                    row += 2 * p.dim;
                    at += p.dim;
                }
                q.precompose(&perm, &vec![0.0; 2 * n], &vec![0.0; 2 * n], 0.0)
            }
            _ => Err(unsupported()),
        }
    }
}

/// `(a, b) ↦ (b, a)` on a stacked vector.
fn swap_blocks(w: &[f64]) -> Vector {
    let n = w.len() / 2;
    let mut out = w[n..].to_vec();
    out.extend_from_slice(&w[..n]);
    out
}

fn swap_blocks_pairs(w: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let n = w.len() / 2;
    let mut out = w[n..].to_vec();
    out.extend_from_slice(&w[..n]);
    out
}

fn swap_matrix(n: usize) -> linalg::Matrix {
    let mut p = linalg::Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        p[(i, n + i)] = 1.0;
        p[(n + i, i)] = 1.0;
    }
    p
}

/// The block `(x[at..at+d], x*[at..at+d])` of a stacked vector.
fn gather(w: &[f64], n: usize, at: usize, d: usize) -> Vector {
    let mut out = w[at..at + d].to_vec();
    out.extend_from_slice(&w[n + at..n + at + d]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half_square() -> Bifunction {
        Bifunction::separable(ConvexFunction::half_square(1).unwrap()).unwrap()
    }

    fn w(p: &[f64]) -> PrimalDualPoint {
        PrimalDualPoint::from_stacked(p)
    }

    #[test]
    fn separable_conjugate_swaps_roles() {
        let f = ConvexFunction::abs_norm(1).unwrap();
        let h = Bifunction::separable(f).unwrap();
        let hc = h.conjugate().unwrap();
        // h*(1, 2) = f*(1) + f(2) = 2
        assert_eq!(hc.eval(&w(&[1.0, 2.0])).unwrap().value(), 2.0);
        assert!(hc.eval(&w(&[1.5, 2.0])).unwrap().is_pos_inf());
    }

    #[test]
    fn translation_example() {
        let h = half_square();
        let t = h.translate(&[1.0], &[1.0]).unwrap();
        assert!(t.eval(&w(&[0.0, 0.0])).unwrap().value().abs() < 1e-15);
    }

    #[test]
    fn materialized_forms_agree() {
        let h = half_square().translate(&[0.3], &[-1.1]).unwrap().scaled(1.7).unwrap();
        let q = h.to_quadratic().unwrap();
        for p in [[0.0, 0.0], [1.0, -2.0], [0.4, 0.9]] {
            let a = h.eval_w(&p).unwrap();
            let b = q.eval(&p);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    fn brute_prox(h: &Bifunction, v: &[f64]) -> (f64, Vector) {
        let mut best = (f64::INFINITY, vec![]);
        for i in -300..=300 {
            for j in -300..=300 {
                let u = [v[0] + i as f64 * 0.01, v[1] + j as f64 * 0.01];
                let val = h.eval_w(&u).unwrap() + 0.5 * ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2));
                if val < best.0 {
                    best = (val, u.to_vec());
                }
            }
        }
        best
    }

    #[test]
    fn prox_of_wrapped_kinds_matches_grid_search() {
        let abs = Bifunction::separable(ConvexFunction::abs_norm(1).unwrap()).unwrap();
        let cases = vec![
            half_square().translate(&[0.5], &[-0.5]).unwrap(),
            abs.transposed().scaled(0.7).unwrap(),
            Bifunction::max_affine(vec![vec![1.0, 0.5], vec![-1.0, 0.0], vec![0.0, -2.0]], vec![0.0, 0.3, -0.1]).unwrap(),
            Bifunction::hull(PointCloud::new(
                vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
                vec![0.0, 0.5, 0.5, 2.0],
            ).unwrap()).unwrap(),
        ];
        for h in &cases {
            let v = [0.8, -0.6];
            let u = h.prox(&v, &[1.0, 1.0]).unwrap();
            let val = h.eval_w(&u).unwrap() + 0.5 * ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2));
            let (bval, _) = brute_prox(h, &v);
            assert!(val <= bval + 1e-12, "{h:?}: {val} > {bval}");
            assert!(val >= bval - 5e-3, "{h:?}");
        }
    }

    proptest! {
        #[test]
        fn double_translation_is_identity(
            z in -2.0f64..2.0, zs in -2.0f64..2.0, x in -3.0f64..3.0, xs in -3.0f64..3.0,
        ) {
            let h = half_square();
            let back = h.translate(&[z], &[zs]).unwrap().translate(&[-z], &[-zs]).unwrap();
            let p = w(&[x, xs]);
            let a = h.eval(&p).unwrap().value();
            let b = back.eval(&p).unwrap().value();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()) * 10.0);
        }

        #[test]
        fn scaled_conjugate_identity(s in 0.2f64..5.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let h = half_square().translate(&[0.2], &[0.1]).unwrap();
            let lhs = h.scaled(s).unwrap().conjugate().unwrap().eval_w(&[a, b]).unwrap();
            let rhs = h.conjugate().unwrap().eval_w(&[s * a, b / s]).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-9);
        }
    }
}
