//! Proper convex functions on `R^n` and their Fenchel conjugates.

mod duality;

use std::sync::Arc;

pub use duality::{eps_subdiff_test, fenchel_duality, fenchel_young_gap, DualitySolveReport};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::GridFn;
use crate::linalg::{self, Matrix, Vector};
use crate::operators::DualSet;
use crate::solver::epi;
use crate::tolerance::TolClass;

#[derive(Debug, Clone, PartialEq)]
pub enum FnKind {
    /// `½ xᵀAx + bᵀx + c` with `A` symmetric positive semidefinite.
    Quadratic { a: Matrix, b: Vector, c: f64 },
    /// `‖x‖₁`.
    AbsNorm,
    /// Indicator of `[lo, hi]`; bounds may be infinite.
    BoxIndicator { lo: Vector, hi: Vector },
    /// `Σ max(lo_i x_i, hi_i x_i)`, the support function of `[lo, hi]`.
    BoxSupport { lo: Vector, hi: Vector },
    /// Sum of functions acting on consecutive coordinate blocks.
    Separable(Vec<ConvexFunction>),
    /// `base(x − shift) + ⟨tilt, x⟩ + offset`.
    Translated {
        base: Box<ConvexFunction>,
        shift: Vector,
        tilt: Vector,
        offset: f64,
    },
    /// Lower convex envelope of grid samples.
    Grid(Arc<GridFn>),
    /// Discrete conjugate of a grid function: `max_nodes ⟨p, s⟩ − f(p)`.
    GridConjugate(Arc<GridFn>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexFunction {
    dim: usize,
    kind: FnKind,
}

fn check_len(context: &'static str, n: usize, v: &[f64]) -> Result<()> {
    if v.len() != n {
        Err(Error::dims(context, n, v.len()))
    } else {
        Ok(())
    }
}

fn check_finite(context: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{context} must be finite")))
    }
}

impl ConvexFunction {
    pub fn quadratic(a: Matrix, b: Vector, c: f64) -> Result<Self> {
        let n = b.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::dims("quadratic matrix", n, a.nrows()));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        check_finite("quadratic coefficients", a.as_slice())?;
        check_finite("quadratic coefficients", &b)?;
        if !c.is_finite() {
            return Err(Error::InvalidParameter("quadratic constant must be finite".into()));
        }
        let a = linalg::symmetrize(&a);
        linalg::check_psd(&a)?;
        Ok(ConvexFunction {
            dim: n,
            kind: FnKind::Quadratic { a, b, c },
        })
    }

    /// `½‖x‖²` on `R^n`.
    pub fn half_square(n: usize) -> Result<Self> {
        ConvexFunction::quadratic(linalg::identity(n), vec![0.0; n], 0.0)
    }

    pub fn abs_norm(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(ConvexFunction {
            dim: n,
            kind: FnKind::AbsNorm,
        })
    }

    fn check_box(lo: &[f64], hi: &[f64]) -> Result<()> {
        check_len("box upper bound", lo.len(), hi)?;
        if lo.is_empty() {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        for (l, h) in lo.iter().zip(hi) {
            if l.is_nan() || h.is_nan() || *l == f64::INFINITY || *h == f64::NEG_INFINITY || l > h {
                return Err(Error::InvalidParameter(format!(
                    "box bounds must satisfy lo ≤ hi with lo < +inf and hi > -inf (got [{l}, {h}])"
                )));
            }
        }
        Ok(())
    }

    pub fn box_indicator(lo: Vector, hi: Vector) -> Result<Self> {
        Self::check_box(&lo, &hi)?;
        Ok(ConvexFunction {
            dim: lo.len(),
            kind: FnKind::BoxIndicator { lo, hi },
        })
    }

    /// Indicator of the single point `p`.
    pub fn point_indicator(p: Vector) -> Result<Self> {
        check_finite("point", &p)?;
        ConvexFunction::box_indicator(p.clone(), p)
    }

    pub fn box_support(lo: Vector, hi: Vector) -> Result<Self> {
        Self::check_box(&lo, &hi)?;
        Ok(ConvexFunction {
            dim: lo.len(),
            kind: FnKind::BoxSupport { lo, hi },
        })
    }

    pub fn separable(parts: Vec<ConvexFunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("separable sum needs at least one part".into()));
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        Ok(ConvexFunction {
            dim,
            kind: FnKind::Separable(parts),
        })
    }

    pub fn translated(base: ConvexFunction, shift: Vector, tilt: Vector, offset: f64) -> Result<Self> {
        check_len("translation shift", base.dim, &shift)?;
        check_len("translation tilt", base.dim, &tilt)?;
        check_finite("translation", &shift)?;
        check_finite("translation", &tilt)?;
        if !offset.is_finite() {
            return Err(Error::InvalidParameter("offset must be finite".into()));
        }
        Ok(ConvexFunction {
            dim: base.dim,
            kind: FnKind::Translated {
                base: Box::new(base),
                shift,
                tilt,
                offset,
            },
        })
    }

    pub fn grid(g: GridFn) -> Self {
        ConvexFunction {
            dim: g.dim(),
            kind: FnKind::Grid(Arc::new(g)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &FnKind {
        &self.kind
    }

    pub fn tol_class(&self) -> TolClass {
        match &self.kind {
            FnKind::Grid(_) | FnKind::GridConjugate(_) => TolClass::Grid,
            FnKind::Separable(parts) => parts
                .iter()
                .fold(TolClass::ClosedForm, |c, p| c.join(p.tol_class())),
            FnKind::Translated { base, .. } => base.tol_class(),
            _ => TolClass::ClosedForm,
        }
    }

    /// True for the closed-form catalogue (no grid-backed parts).
    pub fn is_catalogue(&self) -> bool {
        match &self.kind {
            FnKind::Grid(_) | FnKind::GridConjugate(_) => false,
            FnKind::Separable(parts) => parts.iter().all(ConvexFunction::is_catalogue),
            FnKind::Translated { base, .. } => base.is_catalogue(),
            _ => true,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        check_len("function argument", self.dim, x)?;
        Ok(ExtReal::from(self.eval_raw(x)?))
    }

    fn eval_raw(&self, x: &[f64]) -> Result<f64> {
        Ok(match &self.kind {
            FnKind::Quadratic { a, b, c } => linalg::half_quad(a, x) + linalg::dot(b, x) + c,
            FnKind::AbsNorm => x.iter().map(|v| v.abs()).sum(),
            FnKind::BoxIndicator { lo, hi } => {
                if x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            FnKind::BoxSupport { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&v, (&l, &h))| {
                    if v > 0.0 {
                        h * v
                    } else if v < 0.0 {
                        l * v
                    } else {
                        0.0
                    }
                })
                .sum(),
            FnKind::Separable(parts) => {
                let mut total = 0.0;
                let mut at = 0;
                for p in parts {
                    total += p.eval_raw(&x[at..at + p.dim])?;
                    at += p.dim;
                }
                total
            }
            FnKind::Translated {
                base,
                shift,
                tilt,
                offset,
            } => base.eval_raw(&linalg::sub(x, shift))? + linalg::dot(tilt, x) + offset,
            FnKind::Grid(g) => g.eval(x)?,
            FnKind::GridConjugate(g) => g.conjugate_at(x),
        })
    }

    /// Fenchel conjugate `f*(s) = sup_x ⟨x, s⟩ − f(x)`.
    pub fn conjugate(&self) -> Result<ConvexFunction> {
        let n = self.dim;
        let kind = match &self.kind {
            FnKind::Quadratic { a, b, c } => {
                let amax = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                if amax == 0.0 {
                    // Affine function: conjugate is the indicator of {b}, shifted by −c.
                    return ConvexFunction::translated(
                        ConvexFunction::point_indicator(vec![0.0; n])?,
                        b.clone(),
                        vec![0.0; n],
                        -c,
                    );
                }
                let inv = linalg::spd_inverse(a).map_err(|_| {
                    Error::Unsupported(
                        "conjugate of a quadratic with singular nonzero matrix".into(),
                    )
                })?;
                let ib = linalg::mat_vec(&inv, b);
                FnKind::Quadratic {
                    a: inv,
                    b: linalg::scale(&ib, -1.0),
                    c: 0.5 * linalg::dot(b, &ib) - c,
                }
            }
            FnKind::AbsNorm => FnKind::BoxIndicator {
                lo: vec![-1.0; n],
                hi: vec![1.0; n],
            },
            FnKind::BoxIndicator { lo, hi } => FnKind::BoxSupport {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            FnKind::BoxSupport { lo, hi } => FnKind::BoxIndicator {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            FnKind::Separable(parts) => FnKind::Separable(
                parts
                    .iter()
                    .map(ConvexFunction::conjugate)
                    .collect::<Result<_>>()?,
            ),
            FnKind::Translated {
                base,
                shift,
                tilt,
                offset,
            } => FnKind::Translated {
                base: Box::new(base.conjugate()?),
                shift: tilt.clone(),
                tilt: shift.clone(),
                offset: -offset - linalg::dot(shift, tilt),
            },
            FnKind::Grid(g) => FnKind::GridConjugate(g.clone()),
            FnKind::GridConjugate(g) => FnKind::Grid(g.clone()),
        };
        Ok(ConvexFunction { dim: n, kind })
    }

    /// Slopes for which a grid-backed conjugate agrees with the conjugate of
    /// the untruncated function; `None` when no restriction applies.
    pub fn valid_slopes(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            FnKind::GridConjugate(g) => Some(g.slope_box()),
            FnKind::Separable(parts) => {
                if parts.iter().all(|p| p.valid_slopes().is_none()) {
                    return None;
                }
                Some(
                    parts
                        .iter()
                        .flat_map(|p| {
                            p.valid_slopes()
                                .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); p.dim])
                        })
                        .collect(),
                )
            }
            FnKind::Translated { base, tilt, .. } => base.valid_slopes().map(|b| {
                b.iter()
                    .zip(tilt)
                    .map(|(&(l, h), t)| (l + t, h + t))
                    .collect()
            }),
            _ => None,
        }
    }

    /// Warning text when `s` lies outside [`valid_slopes`](Self::valid_slopes).
    pub fn boundary_warning(&self, s: &[f64]) -> Option<String> {
        let bounds = self.valid_slopes()?;
        let outside = s
            .iter()
            .zip(&bounds)
            .any(|(v, (l, h))| *v < l - 1e-12 || *v > h + 1e-12);
        outside.then(|| {
            format!("grid conjugate evaluated at {s:?}, outside the attained slope range {bounds:?}")
        })
    }

    /// Subdifferential at `x` for the closed-form catalogue.
    pub fn subdifferential(&self, x: &[f64]) -> Result<DualSet> {
        check_len("subdifferential argument", self.dim, x)?;
        let n = self.dim;
        Ok(match &self.kind {
            FnKind::Quadratic { a, b, .. } => DualSet::point(linalg::add(&linalg::mat_vec(a, x), b)),
            FnKind::AbsNorm => {
                let lo = x.iter().map(|&v| if v > 0.0 { 1.0 } else { -1.0 }).collect();
                let hi = x.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
                DualSet::Box { lo, hi }
            }
            FnKind::BoxIndicator { lo, hi } => {
                let mut l = vec![0.0; n];
                let mut h = vec![0.0; n];
                for i in 0..n {
                    if x[i] < lo[i] || x[i] > hi[i] {
                        return Ok(DualSet::Empty);
                    }
                    if x[i] == lo[i] {
                        l[i] = f64::NEG_INFINITY;
                    }
                    if x[i] == hi[i] {
                        h[i] = f64::INFINITY;
                    }
                }
                DualSet::Box { lo: l, hi: h }
            }
            FnKind::BoxSupport { lo, hi } => {
                let l = (0..n).map(|i| if x[i] > 0.0 { hi[i] } else { lo[i] }).collect();
                let h = (0..n).map(|i| if x[i] < 0.0 { lo[i] } else { hi[i] }).collect();
                DualSet::Box { lo: l, hi: h }
            }
            FnKind::Separable(parts) => {
                let mut sets = Vec::new();
                let mut at = 0;
                for p in parts {
                    sets.push(p.subdifferential(&x[at..at + p.dim])?);
                    at += p.dim;
                }
                DualSet::product(&sets)?
            }
            FnKind::Translated {
                base, shift, tilt, ..
            } => base.subdifferential(&linalg::sub(x, shift))?.shifted(tilt),
            FnKind::Grid(_) | FnKind::GridConjugate(_) => {
                return Err(Error::Unsupported(
                    "closed-form subdifferential of a grid-sampled function".into(),
                ))
            }
        })
    }

    /// `argmin_u f(u) + ½ Σ m_i (u_i − v_i)²` for positive weights `m`.
    pub fn prox(&self, v: &[f64], m: &[f64]) -> Result<Vector> {
        check_len("prox center", self.dim, v)?;
        check_len("prox metric", self.dim, m)?;
        let n = self.dim;
        Ok(match &self.kind {
            FnKind::Quadratic { a, b, .. } => {
                let mut k = a.clone();
                for i in 0..n {
                    k[(i, i)] += m[i];
                }
                let rhs: Vector = (0..n).map(|i| m[i] * v[i] - b[i]).collect();
                linalg::solve(&k, &rhs).ok_or_else(|| Error::SolverFailure {
                    message: "singular system in quadratic prox".into(),
                    best_value: f64::NAN,
                })?
            }
            FnKind::AbsNorm => (0..n)
                .map(|i| {
                    let t = 1.0 / m[i];
                    v[i].signum() * (v[i].abs() - t).max(0.0)
                })
                .collect(),
            FnKind::BoxIndicator { lo, hi } => (0..n).map(|i| v[i].clamp(lo[i], hi[i])).collect(),
            FnKind::BoxSupport { lo, hi } => (0..n)
                .map(|i| {
                    let up = v[i] - hi[i] / m[i];
                    let down = v[i] - lo[i] / m[i];
                    if up > 0.0 {
                        up
                    } else if down < 0.0 {
                        down
                    } else {
                        0.0
                    }
                })
                .collect(),
            FnKind::Separable(parts) => {
                let mut out = Vec::with_capacity(n);
                let mut at = 0;
                for p in parts {
                    out.extend(p.prox(&v[at..at + p.dim], &m[at..at + p.dim])?);
                    at += p.dim;
                }
                out
            }
            FnKind::Translated {
                base, shift, tilt, ..
            } => {
                let c: Vector = (0..n).map(|i| v[i] - shift[i] - tilt[i] / m[i]).collect();
                linalg::add(&base.prox(&c, m)?, shift)
            }
            FnKind::GridConjugate(g) => {
                let (pts, vals) = g.finite_nodes();
                let offsets: Vec<f64> = vals.iter().map(|v| -v).collect();
                epi::prox_max_affine(pts, &offsets, v, m)?.point
            }
            FnKind::Grid(_) => {
                // Moreau decomposition through the max-affine conjugate.
                let conj = self.conjugate()?;
                let mv: Vector = (0..n).map(|i| m[i] * v[i]).collect();
                let minv: Vector = m.iter().map(|x| 1.0 / x).collect();
                let s = conj.prox(&mv, &minv)?;
                (0..n).map(|i| v[i] - s[i] / m[i]).collect()
            }
        })
    }

    /// A point of the domain, away from its boundary where possible.
    pub fn domain_hint(&self) -> Vector {
        match &self.kind {
            FnKind::BoxIndicator { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| match (l.is_finite(), h.is_finite()) {
                    (true, true) => 0.5 * (l + h),
                    (true, false) => l + 1.0,
                    (false, true) => h - 1.0,
                    (false, false) => 0.0,
                })
                .collect(),
            FnKind::Separable(parts) => parts.iter().flat_map(|p| p.domain_hint()).collect(),
            FnKind::Translated { base, shift, .. } => linalg::add(&base.domain_hint(), shift),
            FnKind::Grid(g) => {
                let (pts, _) = g.finite_nodes();
                let mut c = vec![0.0; self.dim];
                for p in pts {
                    for (ci, pi) in c.iter_mut().zip(p) {
                        *ci += pi / pts.len() as f64;
                    }
                }
                c
            }
            _ => vec![0.0; self.dim],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_conjugate_1d(f: &ConvexFunction, s: f64, r: f64, m: usize) -> f64 {
        (0..=m)
            .map(|i| -r + 2.0 * r * i as f64 / m as f64)
            .map(|x| x * s - f.eval(&[x]).unwrap().value())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let f = ConvexFunction::half_square(1).unwrap();
        let g = f.conjugate().unwrap();
        for s in [-1.5, -0.2, 0.0, 0.7, 1.9] {
            let exact = g.eval(&[s]).unwrap().value();
            assert!((exact - 0.5 * s * s).abs() < 1e-12);
            let brute = brute_conjugate_1d(&f, s, 4.0, 80_000);
            assert!((exact - brute).abs() < 1e-7);
        }
    }

    #[test]
    fn abs_conjugate_is_box_indicator() {
        let f = ConvexFunction::abs_norm(1).unwrap();
        let g = f.conjugate().unwrap();
        for s in [-1.0, -0.3, 0.0, 0.99, 1.0] {
            assert_eq!(g.eval(&[s]).unwrap(), ExtReal::ZERO);
            assert!(brute_conjugate_1d(&f, s, 10.0, 20_000).abs() < 1e-9);
        }
        for s in [-1.2, 1.01] {
            assert!(g.eval(&[s]).unwrap().is_pos_inf());
            // The brute-force sup grows with the search radius.
            assert!(brute_conjugate_1d(&f, s, 1000.0, 2000) > 5.0);
        }
    }

    #[test]
    fn point_indicator_conjugate_vanishes() {
        let f = ConvexFunction::point_indicator(vec![0.0, 0.0]).unwrap();
        let g = f.conjugate().unwrap();
        assert_eq!(g.eval(&[3.0, -7.0]).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn affine_conjugate_is_shifted_point_indicator() {
        let f = ConvexFunction::quadratic(Matrix::zeros(1, 1), vec![2.0], 1.0).unwrap();
        let g = f.conjugate().unwrap();
        assert_eq!(g.eval(&[2.0]).unwrap().value(), -1.0);
        assert!(g.eval(&[2.5]).unwrap().is_pos_inf());
    }

    #[test]
    fn subdifferential_of_abs_at_zero() {
        let f = ConvexFunction::abs_norm(1).unwrap();
        let d = f.subdifferential(&[0.0]).unwrap();
        assert_eq!(
            d,
            DualSet::Box {
                lo: vec![-1.0],
                hi: vec![1.0]
            }
        );
        // Every member satisfies the subgradient inequality on a grid.
        for k in -10..=10 {
            let s = k as f64 / 10.0;
            for j in -50..=50 {
                let y = j as f64 / 10.0;
                assert!(y.abs() >= s * y - 1e-12);
            }
        }
    }

    #[test]
    fn grid_conjugate_of_sampled_half_square() {
        let g = crate::grid::ProductGrid::uniform_box(1, 2.0, 401).unwrap();
        let f = ConvexFunction::grid(GridFn::from_fn(g, |p| 0.5 * p[0] * p[0]).unwrap());
        let c = f.conjugate().unwrap();
        for s in [-1.5, 0.0, 0.4, 1.9] {
            let v = c.eval(&[s]).unwrap().value();
            assert!((v - 0.5 * s * s).abs() < 1e-4, "{s}: {v}");
            assert!(c.boundary_warning(&[s]).is_none());
        }
        assert!(c.boundary_warning(&[2.5]).is_some());
        // Biconjugation returns the hull of the samples.
        let back = c.conjugate().unwrap();
        assert!((back.eval(&[0.3]).unwrap().value() - 0.045).abs() < 1e-4);
    }

    fn brute_prox_1d(f: &ConvexFunction, v: f64, m: f64) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for i in -40_000..=40_000 {
            let u = v + i as f64 * 1e-4;
            let val = f.eval(&[u]).unwrap().value() + 0.5 * m * (u - v) * (u - v);
            if val < best.0 {
                best = (val, u);
            }
        }
        best.1
    }

    #[test]
    fn prox_matches_brute_force() {
        let fs = vec![
            ConvexFunction::abs_norm(1).unwrap(),
            ConvexFunction::box_indicator(vec![-0.5], vec![1.0]).unwrap(),
            ConvexFunction::box_support(vec![-0.5], vec![1.0]).unwrap(),
            ConvexFunction::quadratic(linalg::from_rows(&[vec![2.0]]).unwrap(), vec![1.0], 0.0).unwrap(),
            ConvexFunction::translated(ConvexFunction::abs_norm(1).unwrap(), vec![0.7], vec![0.2], 1.0)
                .unwrap(),
        ];
        for f in &fs {
            for (v, m) in [(1.7, 1.0), (-0.4, 3.0), (0.2, 0.5)] {
                let p = f.prox(&[v], &[m]).unwrap()[0];
                assert!((p - brute_prox_1d(f, v, m)).abs() < 2e-4, "{f:?} at {v}");
            }
        }
    }

    proptest! {
        #[test]
        fn biconjugate_of_quadratics(a in 0.1f64..5.0, b in -3.0f64..3.0, c in -2.0f64..2.0, x in -5.0f64..5.0) {
            let f = ConvexFunction::quadratic(linalg::from_rows(&[vec![a]]).unwrap(), vec![b], c).unwrap();
            let ff = f.conjugate().unwrap().conjugate().unwrap();
            let d = (f.eval(&[x]).unwrap().value() - ff.eval(&[x]).unwrap().value()).abs();
            prop_assert!(d < 1e-9 * (1.0 + x * x));
        }

        #[test]
        fn fenchel_young_inequality(x in -4.0f64..4.0, s in -4.0f64..4.0, shift in -1.0f64..1.0, tilt in -1.0f64..1.0) {
            let fs = [
                ConvexFunction::half_square(1).unwrap(),
                ConvexFunction::abs_norm(1).unwrap(),
                ConvexFunction::box_indicator(vec![-1.0], vec![2.0]).unwrap(),
                ConvexFunction::translated(ConvexFunction::abs_norm(1).unwrap(), vec![shift], vec![tilt], 0.3).unwrap(),
            ];
            for f in &fs {
                let g = f.conjugate().unwrap();
                let lhs = f.eval(&[x]).unwrap().checked_add(g.eval(&[s]).unwrap()).unwrap();
                prop_assert!(lhs >= ExtReal::from(x * s - 1e-9));
            }
        }

        #[test]
        fn prox_members_are_subgradient_pairs(v in -3.0f64..3.0, m in 0.2f64..4.0) {
            // m (v − u) ∈ ∂f(u) at u = prox(v).
            let fs = [
                ConvexFunction::abs_norm(1).unwrap(),
                ConvexFunction::box_support(vec![-2.0], vec![0.5]).unwrap(),
                ConvexFunction::box_indicator(vec![f64::NEG_INFINITY], vec![0.5]).unwrap(),
            ];
            for f in &fs {
                let u = f.prox(&[v], &[m]).unwrap();
                let s = m * (v - u[0]);
                prop_assert!(f.subdifferential(&u).unwrap().contains(&[s], 1e-9));
            }
        }
    }
}
