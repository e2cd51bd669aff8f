//! Checks relating a bifunction to the duality product `π(x, x*) = ⟨x, x*⟩`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{BiKind, Bifunction};
use crate::convexfn::ConvexFunction;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{GridFn, PointCloud, ProductGrid};
use crate::linalg::{self, Vector};
use crate::operators::{MonotoneOperator, OperatorKind, PrimalDualPoint};
use crate::tolerance::{TolClass, CONVEXITY_TRIALS, TOL_X};

const CONVEXITY_SEED: u64 = 0x00C0_FFEE;

/// Points at which a bifunction is examined.
#[derive(Debug, Clone, PartialEq)]
pub enum TestSet {
    /// A product grid over `R^n × R^n` (stacked coordinates).
    Grid(ProductGrid),
    Points(Vec<PrimalDualPoint>),
}

impl TestSet {
    /// `m` points per axis on `[−r, r]^{2n}`.
    pub fn box_grid(n: usize, r: f64, m: usize) -> Result<Self> {
        Ok(TestSet::Grid(ProductGrid::uniform_box(2 * n, r, m)?))
    }

    /// Dimension `n` of the primal space.
    pub fn dim(&self) -> usize {
        match self {
            TestSet::Grid(g) => g.dim() / 2,
            TestSet::Points(p) => p.first().map_or(0, PrimalDualPoint::dim),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TestSet::Grid(g) => g.len(),
            TestSet::Points(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stacked coordinates of every test point.
    pub fn stacked(&self) -> Vec<Vector> {
        match self {
            TestSet::Grid(g) => g.points().collect(),
            TestSet::Points(p) => p.iter().map(PrimalDualPoint::stacked).collect(),
        }
    }

    fn bounds(&self) -> (Vector, Vector) {
        let pts = self.stacked();
        let d = 2 * self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in &pts {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }
}

fn check_dim(context: &'static str, h: &Bifunction, set: &TestSet) -> Result<()> {
    if set.is_empty() {
        return Err(Error::InvalidParameter("test set is empty".into()));
    }
    if set.dim() != h.dim() {
        return Err(Error::dims(context, h.dim(), set.dim()));
    }
    Ok(())
}

fn pairing(w: &[f64]) -> f64 {
    let n = w.len() / 2;
    linalg::dot(&w[..n], &w[n..])
}

/// `φ_T(p)`; a lower bound for sampled graphs.
pub fn fitzpatrick_eval(t: &MonotoneOperator, p: &PrimalDualPoint) -> Result<ExtReal> {
    Bifunction::fitzpatrick(t)?.eval(p)
}

/// `σ_T(p)`.
pub fn sigma_eval(t: &MonotoneOperator, p: &PrimalDualPoint) -> Result<ExtReal> {
    Bifunction::sigma(t)?.eval(p)
}

/// `h*` with the canonical signature `h*(x*, x**)`.
pub fn bifunction_conjugate(h: &Bifunction) -> Result<Bifunction> {
    h.conjugate()
}

/// `h_{(z, z*)}`.
pub fn translate(h: &Bifunction, z: &[f64], zstar: &[f64]) -> Result<Bifunction> {
    h.translate(z, zstar)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapWitness {
    pub point: PrimalDualPoint,
    pub gap: f64,
}

/// Minimum gaps `h − π` and `h* − π` over a test set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub primal_min_gap: ExtReal,
    pub dual_min_gap: ExtReal,
    pub primal_witness: Option<GapWitness>,
    pub dual_witness: Option<GapWitness>,
    pub verdict: bool,
    pub tol_class: TolClass,
    /// Test points where the conjugate was not trusted (outside the valid
    /// slope region of a grid-backed conjugate).
    pub skipped_invalid: usize,
}

struct MinGap {
    value: f64,
    at: Option<Vector>,
}

impl MinGap {
    fn new() -> Self {
        MinGap {
            value: f64::INFINITY,
            at: None,
        }
    }

    fn offer(&mut self, w: &[f64], gap: f64) {
        if gap < self.value {
            self.value = gap;
            self.at = Some(w.to_vec());
        }
    }

    fn witness(&self) -> Option<GapWitness> {
        self.at.as_ref().map(|w| GapWitness {
            point: PrimalDualPoint::from_stacked(w),
            gap: self.value,
        })
    }
}

/// Verifies `h ≥ π` and `h* ≥ π` on the test set, the latter only at
/// points inside the conjugate's valid region.
pub fn check_dual_condition(h: &Bifunction, set: &TestSet) -> Result<ConditionReport> {
    check_dim("dual condition test set", h, set)?;
    let class = h.tol_class();
    let mut primal = MinGap::new();
    let mut dual = MinGap::new();
    let mut skipped = 0;

    if let (BiKind::Grid(g), TestSet::Grid(tg)) = (h.kind(), set) {
        // Grid kinds: envelope values at the nodes and the discrete
        // conjugate computed axis by axis.
        let primal_vals: Vec<f64> = if g.grid() == tg {
            g.node_hull_values()?.to_vec()
        } else {
            tg.points().map(|w| g.eval(&w)).collect::<Result<_>>()?
        };
        let dual_vals = g.conjugate_on(tg)?;
        let valid = g.slope_box();
        for (i, w) in tg.points().enumerate() {
            let pi = pairing(&w);
            if primal_vals[i].is_finite() {
                primal.offer(&w, primal_vals[i] - pi);
            }
            if !w.iter().zip(&valid).all(|(v, (l, u))| *v >= l - 1e-12 && *v <= u + 1e-12) {
                skipped += 1;
                continue;
            }
            if dual_vals[i].is_finite() {
                dual.offer(&w, dual_vals[i] - pi);
            }
        }
    } else {
        let hc = h.conjugate()?;
        for w in set.stacked() {
            let pi = pairing(&w);
            let v = h.eval_w(&w)?;
            if v.is_finite() {
                primal.offer(&w, v - pi);
            }
            if !hc.is_valid_at(&w) {
                skipped += 1;
                continue;
            }
            let v = hc.eval_w(&w)?;
            if v.is_finite() {
                dual.offer(&w, v - pi);
            }
        }
    }
    let tol = class.rep();
    Ok(ConditionReport {
        primal_min_gap: ExtReal::from(primal.value),
        dual_min_gap: ExtReal::from(dual.value),
        primal_witness: primal.witness(),
        dual_witness: dual.witness(),
        verdict: primal.value >= -tol && dual.value >= -tol,
        tol_class: class,
        skipped_invalid: skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// Minimum of `h − π` over the test set (not computed for lower-bound
    /// functions, which need not majorize `π` off the graph).
    pub min_gap: Option<ExtReal>,
    pub min_gap_witness: Option<GapWitness>,
    /// Largest violation of `h = π` at the graph points (one-sided for
    /// lower-bound functions).
    #[serde(serialize_with = "crate::extreal::serialize_f64")]
    pub graph_max_deviation: f64,
    pub graph_points: usize,
    /// Failed midpoint tests out of `convexity_trials`.
    pub convexity_violations: usize,
    pub convexity_trials: usize,
    pub lower_bound: bool,
    pub tol_class: TolClass,
}

fn graph_points(t: &MonotoneOperator, set: &TestSet) -> Result<Vec<PrimalDualPoint>> {
    if let OperatorKind::SampledGraph(pts) = t.kind() {
        return Ok(pts.clone());
    }
    let n = t.dim();
    let mut out = Vec::new();
    let mut xs: Vec<Vector> = Vec::new();
    for w in set.stacked() {
        let p = PrimalDualPoint::from_stacked(&w);
        if !xs.iter().any(|x| linalg::norm_inf(&linalg::sub(x, &w[..n])) <= TOL_X) {
            xs.push(w[..n].to_vec());
        }
        if t.graph_contains(&p, TOL_X)? {
            out.push(p);
        }
    }
    out.extend(t.sample_graph(&xs)?);
    Ok(out)
}

/// Whether `h` belongs to the Fitzpatrick family of `T`: `h ≥ π` on the
/// test set, `h = π` on graph points, and `h` midpoint convex.
pub fn family_membership(h: &Bifunction, t: &MonotoneOperator, set: &TestSet) -> Result<MembershipReport> {
    check_dim("membership test set", h, set)?;
    if t.dim() != h.dim() {
        return Err(Error::dims("membership operator", h.dim(), t.dim()));
    }
    let class = h.tol_class().join(t.tol_class());
    let tol = class.rep();
    let lower = h.is_lower_bound();

    let (min_gap, witness) = if lower {
        (None, None)
    } else {
        let mut m = MinGap::new();
        for w in set.stacked() {
            let v = h.eval_w(&w)?;
            if v.is_finite() {
                m.offer(&w, v - pairing(&w));
            }
        }
        (Some(ExtReal::from(m.value)), m.witness())
    };

    let graph = graph_points(t, set)?;
    let mut graph_dev: f64 = 0.0;
    for p in &graph {
        let w = p.stacked();
        let gap = h.eval_w(&w)? - pairing(&w);
        let dev = if lower { (-gap).max(0.0) } else { gap.abs() };
        graph_dev = graph_dev.max(if dev.is_nan() { f64::INFINITY } else { dev });
    }

    let (violations, trials) = if h.tol_class() == TolClass::Grid && h.convex_by_construction() {
        (0, 0)
    } else {
        midpoint_violations(h, set, tol)?
    };

    let member = min_gap.is_none_or(|g| g.value() >= -tol) && graph_dev <= tol && violations == 0;
    Ok(MembershipReport {
        member,
        min_gap,
        min_gap_witness: witness,
        graph_max_deviation: graph_dev,
        graph_points: graph.len(),
        convexity_violations: violations,
        convexity_trials: trials,
        lower_bound: lower,
        tol_class: class,
    })
}

/// Seeded random segments in the bounding box of the test set, checking
/// `h((a + b)/2) ≤ (h(a) + h(b))/2`.
fn midpoint_violations(h: &Bifunction, set: &TestSet, tol: f64) -> Result<(usize, usize)> {
    let (lo, hi) = set.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(CONVEXITY_SEED);
    let draw = |rng: &mut ChaCha8Rng| -> Vector {
        lo.iter()
            .zip(&hi)
            .map(|(l, u)| if u > l { rng.random_range(*l..=*u) } else { *l })
            .collect()
    };
    let mut violations = 0;
    for _ in 0..CONVEXITY_TRIALS {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let mid: Vector = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let (fa, fb) = (h.eval_w(&a)?, h.eval_w(&b)?);
        if !(fa.is_finite() && fb.is_finite()) {
            continue;
        }
        let avg = 0.5 * (fa + fb);
        if h.eval_w(&mid)? > avg + tol * (1.0 + avg.abs()) {
            violations += 1;
        }
    }
    Ok((violations, CONVEXITY_TRIALS))
}

/// Largest deviation between `h_{(z, z*)}(p) − π(p)` and
/// `h(p + (z, z*)) − π(p + (z, z*))`.
pub fn translation_gap_deviation(
    h: &Bifunction,
    z: &[f64],
    zstar: &[f64],
    points: &[PrimalDualPoint],
) -> Result<f64> {
    let t = h.translate(z, zstar)?;
    let shift = PrimalDualPoint::new(z.to_vec(), zstar.to_vec())?;
    let mut worst: f64 = 0.0;
    for p in points {
        let lhs = t.eval(p)?.value() - p.duality_product();
        let q = p.add(&shift);
        let rhs = h.eval(&q)?.value() - q.duality_product();
        worst = worst.max(deviation(lhs, rhs));
    }
    Ok(worst)
}

fn deviation(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationReport {
    #[serde(serialize_with = "crate::extreal::serialize_f64")]
    pub max_deviation: f64,
    pub compared: usize,
    pub skipped_invalid: usize,
    pub warnings: Vec<String>,
    pub tol_class: TolClass,
}

/// Compares `(h_{(z, z*)})*` with `(h*)_{(z*, z)}` at the sample points.
///
/// The left side conjugates an explicit rewrite of the translated function
/// (a single quadratic, a split sum, or a shifted point set), so it does
/// not reuse the symbolic rule that produces the right side.
pub fn translation_conjugate_check(
    h: &Bifunction,
    z: &[f64],
    zstar: &[f64],
    points: &[PrimalDualPoint],
) -> Result<TranslationReport> {
    let lhs = materialize_translation(h, z, zstar)?.conjugate()?;
    let rhs = h.conjugate()?.translate(zstar, z)?;
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut skipped = 0;
    let mut warnings = Vec::new();
    for q in points {
        let w = q.stacked();
        if !(lhs.is_valid_at(&w) && rhs.is_valid_at(&w)) {
            skipped += 1;
            if warnings.len() < 8 {
                warnings.push(format!("conjugate touches the slope boundary at {w:?}"));
            }
            continue;
        }
        worst = worst.max(deviation(lhs.eval_w(&w)?, rhs.eval_w(&w)?));
        compared += 1;
    }
    Ok(TranslationReport {
        max_deviation: worst,
        compared,
        skipped_invalid: skipped,
        warnings,
        tol_class: h.tol_class(),
    })
}

/// `h_{(z, z*)}` rewritten without the translation wrapper.
fn materialize_translation(h: &Bifunction, z: &[f64], zstar: &[f64]) -> Result<Bifunction> {
    let n = h.dim();
    if z.len() != n || zstar.len() != n {
        return Err(Error::dims("translation vector", n, z.len().max(zstar.len())));
    }
    if let Ok(q) = h.translate(z, zstar)?.to_quadratic() {
        return Bifunction::quadratic(q);
    }
    let mut zeta = z.to_vec();
    zeta.extend_from_slice(zstar);
    let mut zbar = zstar.to_vec();
    zbar.extend_from_slice(z);
    let pz = linalg::dot(z, zstar);
    // Envelope of points (p, v): translating subtracts an affine function,
    // which moves each point to (p − ζ, v − ⟨p − ζ, ζ̄⟩ − π(ζ)).
    let shift_cloud = |pts: &[Vector], vals: &[f64]| -> Result<Bifunction> {
        let moved: Vec<Vector> = pts.iter().map(|p| linalg::sub(p, &zeta)).collect();
        let v = moved
            .iter()
            .zip(vals)
            .map(|(p, v)| v - linalg::dot(p, &zbar) - pz)
            .collect();
        Bifunction::hull(PointCloud::new(moved, v)?)
    };
    match h.kind() {
        BiKind::Separable { f, g, .. } => Bifunction::split(
            ConvexFunction::translated(
                f.clone(),
                linalg::scale(z, -1.0),
                linalg::scale(zstar, -1.0),
                -pz,
            )?,
            ConvexFunction::translated(g.clone(), linalg::scale(zstar, -1.0), linalg::scale(z, -1.0), 0.0)?,
        ),
        BiKind::Hull(c) => shift_cloud(c.points(), c.values()),
        BiKind::Grid(g) => {
            let (pts, vals) = g.finite_nodes();
            shift_cloud(pts, vals)
        }
        BiKind::MaxAffine { slopes, offsets, .. } => {
            let s = slopes.iter().map(|g| linalg::sub(g, &zbar)).collect();
            let e = slopes
                .iter()
                .zip(offsets.iter())
                .map(|(g, e)| e + linalg::dot(g, &zeta) - pz)
                .collect();
            let out = Bifunction::max_affine(s, e)?;
            Ok(if h.is_lower_bound() { out.mark_lower_bound() } else { out })
        }
        BiKind::Translated { base, z: z1, zstar: zs1 } => {
            materialize_translation(base, &linalg::add(z, z1), &linalg::add(zstar, zs1))
        }
        BiKind::PairSum(parts) => {
            let mut at = 0;
            let mut out = Vec::with_capacity(parts.len());
            for p in parts {
                let d = p.dim();
                out.push(materialize_translation(p, &z[at..at + d], &zstar[at..at + d])?);
                at += d;
            }
            Bifunction::pair_sum(out)
        }
        _ => Err(Error::Unsupported(
            "translation cannot be rewritten for this bifunction kind".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphConjugateReport {
    pub holds: bool,
    /// `h*(x*, x)`.
    pub conjugate_value: ExtReal,
    /// `⟨x, x*⟩`.
    pub pairing: f64,
}

/// At a point where `h = π`, tests `h*(x*, x) = ⟨x, x*⟩`.
pub fn graph_conjugate_equality(h: &Bifunction, p: &PrimalDualPoint) -> Result<GraphConjugateReport> {
    let tol = h.tol_class().rep();
    let pi = p.duality_product();
    let v = h.eval(p)?;
    if !v.is_finite() || (v.value() - pi).abs() > tol * (1.0 + pi.abs()) {
        return Err(Error::Precondition(format!(
            "h(p) = {v} differs from ⟨x, x*⟩ = {pi}"
        )));
    }
    let c = h.conjugate()?.eval(&p.transposed())?;
    let holds = c.is_finite() && (c.value() - pi).abs() <= tol * (1.0 + pi.abs());
    Ok(GraphConjugateReport {
        holds,
        conjugate_value: c,
        pairing: pi,
    })
}

/// The lower convex envelope of a grid bifunction's samples, as a grid
/// bifunction on the same nodes.
pub fn convex_closure(h: &Bifunction) -> Result<Bifunction> {
    match h.kind() {
        BiKind::Grid(g) => {
            let vals = g.node_hull_values()?.to_vec();
            Bifunction::grid(GridFn::new(g.grid().clone(), vals)?)
        }
        _ => Err(Error::Precondition("convex closure needs a grid bifunction".into())),
    }
}

impl Bifunction {
    /// Grid samples of `self` on a product grid over `R^n × R^n`.
    pub fn sample_on(&self, grid: ProductGrid) -> Result<Bifunction> {
        if grid.dim() != 2 * self.dim() {
            return Err(Error::dims("sampling grid", 2 * self.dim(), grid.dim()));
        }
        let vals = grid.points().map(|w| self.eval_w(&w)).collect::<Result<Vec<_>>>()?;
        Bifunction::grid(GridFn::new(grid, vals)?)
    }

    /// Underlying grid samples, when `self` is a grid kind.
    pub fn grid_fn(&self) -> Option<Arc<GridFn>> {
        match self.kind() {
            BiKind::Grid(g) => Some(g.clone()),
            _ => None,
        }
    }
}
