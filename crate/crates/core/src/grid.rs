//! Product grids and grid-sampled functions with lower-convex-hull
//! semantics.

use std::io::Write;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::solver::{envelope, lp};

/// Cartesian product of strictly increasing axes, indexed row-major with
/// the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    axes: Vec<Vec<f64>>,
}

impl ProductGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        for (k, ax) in axes.iter().enumerate() {
            if ax.is_empty() {
                return Err(Error::InvalidParameter(format!("grid axis {k} is empty")));
            }
            if ax.iter().any(|v| !v.is_finite()) || ax.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "grid axis {k} must be finite and strictly increasing"
                )));
            }
        }
        Ok(ProductGrid { axes })
    }

    /// `m` equispaced nodes per axis on `[−r, r]^dim` (the single node 0
    /// when `m = 1`).
    pub fn uniform_box(dim: usize, r: f64, m: usize) -> Result<Self> {
        if dim == 0 || m == 0 || !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "box grid needs dim ≥ 1, m ≥ 1, r > 0 (got dim={dim}, m={m}, r={r})"
            )));
        }
        let axis: Vec<f64> = if m == 1 {
            vec![0.0]
        } else {
            (0..m)
                .map(|i| -r + 2.0 * r * i as f64 / (m - 1) as f64)
                .collect()
        };
        ProductGrid::new(vec![axis; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn point(&self, mut idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        for k in (0..self.dim()).rev() {
            let m = self.axes[k].len();
            p[k] = self.axes[k][idx % m];
            idx /= m;
        }
        p
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn lower(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a[0]).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a[a.len() - 1]).collect()
    }

    fn stride(&self, axis: usize) -> usize {
        self.axes[axis + 1..].iter().map(Vec::len).product()
    }
}

struct HullData {
    base: Vec<f64>,
    /// Orthonormal columns spanning the complement of the directions of the
    /// affine hull of the points.
    normals: Matrix,
    lo: Vec<f64>,
    hi: Vec<f64>,
    scale: f64,
}

/// Finitely many points `(p_j, f_j)`, read as the lower convex envelope of
/// the points: `+∞` outside the convex hull of the `p_j`.
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    hull: OnceLock<HullData>,
}

impl std::fmt::Debug for PointCloud {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PointCloud")
            .field("points", &self.points.len())
            .field("dim", &self.dim())
            .finish()
    }
}

impl PartialEq for PointCloud {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.values == other.values
    }
}

impl Clone for PointCloud {
    fn clone(&self) -> Self {
        PointCloud {
            points: self.points.clone(),
            values: self.values.clone(),
            hull: OnceLock::new(),
        }
    }
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Improper("empty point cloud".into()));
        }
        if points.len() != values.len() {
            return Err(Error::dims("point cloud values", points.len(), values.len()));
        }
        let d = points[0].len();
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(Error::dims("point cloud point", d, bad.len()));
        }
        if points.iter().flatten().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("point cloud entries must be finite".into()));
        }
        Ok(PointCloud {
            points,
            values,
            hull: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn hull_data(&self) -> &HullData {
        self.hull.get_or_init(|| {
            let d = self.dim();
            let base = self.points[0].clone();
            let diffs = Matrix::from_fn(self.points.len(), d, |r, c| self.points[r][c] - base[c]);
            let (_, normals) = linalg::row_space_and_kernel(&diffs);
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            for p in &self.points {
                for k in 0..d {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
            let scale = 1.0 + lo.iter().chain(hi.iter()).fold(0.0_f64, |m, x| m.max(x.abs()));
            HullData {
                base,
                normals,
                lo,
                hi,
                scale,
            }
        })
    }

    fn outside_affine_hull(&self, q: &[f64]) -> bool {
        let h = self.hull_data();
        let tol = 1e-9 * h.scale;
        if q
            .iter()
            .zip(h.lo.iter().zip(&h.hi))
            .any(|(x, (l, u))| *x < l - tol || *x > u + tol)
        {
            return true;
        }
        let diff = linalg::sub(q, &h.base);
        (0..h.normals.ncols()).any(|c| {
            let n: Vec<f64> = h.normals.column(c).iter().copied().collect();
            linalg::dot(&n, &diff).abs() > tol
        })
    }

    /// Value of the lower convex envelope at `q`.
    pub fn eval(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.dim() {
            return Err(Error::dims("point cloud argument", self.dim(), q.len()));
        }
        if self.outside_affine_hull(q) {
            return Ok(f64::INFINITY);
        }
        let h = self.hull_data();
        let q_in: Vec<f64> = q
            .iter()
            .zip(h.lo.iter().zip(&h.hi))
            .map(|(x, (l, u))| x.clamp(*l, *u))
            .collect();
        lp::hull_value(&self.points, &self.values, &q_in).ok_or_else(|| Error::SolverFailure {
            message: "convex-hull linear program did not terminate".into(),
            best_value: f64::INFINITY,
        })
    }

    /// `max_j ⟨p_j, s⟩ − f_j`, the conjugate of the envelope.
    pub fn conjugate_at(&self, s: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(&self.values)
            .map(|(p, v)| linalg::dot(p, s) - v)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples of a function on a product grid; `+∞` marks nodes outside the
/// domain.
///
/// The represented function is the lower convex envelope of the finite
/// samples, `+∞` outside their convex hull. It is convex by construction.
pub struct GridFn {
    grid: ProductGrid,
    values: Vec<f64>,
    cloud: PointCloud,
    chain: Option<(Vec<f64>, Vec<f64>)>,
    node_hull: OnceLock<Vec<f64>>,
}

impl std::fmt::Debug for GridFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridFn")
            .field("grid", &self.grid)
            .field("finite_nodes", &self.cloud.points.len())
            .finish()
    }
}

impl Clone for GridFn {
    fn clone(&self) -> Self {
        GridFn::new(self.grid.clone(), self.values.clone()).expect("validated on construction")
    }
}

impl PartialEq for GridFn {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values
    }
}

impl GridFn {
    pub fn new(grid: ProductGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::dims("grid samples", grid.len(), values.len()));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::Improper("grid sample is NaN or −∞".into()));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::Improper("all grid samples are +∞".into()));
        }
        let mut points = Vec::new();
        let mut finite = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v.is_finite() {
                points.push(grid.point(i));
                finite.push(v);
            }
        }
        let cloud = PointCloud::new(points, finite)?;
        let chain = (grid.dim() == 1).then(|| {
            let xs = &grid.axes[0];
            let idx = envelope::lower_hull_1d(xs, &values);
            (
                idx.iter().map(|&i| xs[i]).collect(),
                idx.iter().map(|&i| values[i]).collect(),
            )
        });
        Ok(GridFn {
            grid,
            values,
            cloud,
            chain,
            node_hull: OnceLock::new(),
        })
    }

    pub fn from_fn(grid: ProductGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = grid.points().map(|p| f(&p)).collect();
        GridFn::new(grid, values)
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Raw samples, before taking the convex envelope.
    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    /// The nodes with finite samples.
    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    /// Coordinates and values of the nodes with finite samples.
    pub fn finite_nodes(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.cloud.points, &self.cloud.values)
    }

    /// Value of the lower convex envelope at `q`.
    pub fn eval(&self, q: &[f64]) -> Result<f64> {
        if q.len() != self.dim() {
            return Err(Error::dims("grid function argument", self.dim(), q.len()));
        }
        if let Some((hx, hf)) = &self.chain {
            let scale = 1.0 + hx[0].abs().max(hx[hx.len() - 1].abs());
            let tol = 1e-12 * scale;
            let (a, b) = (hx[0], hx[hx.len() - 1]);
            if q[0] < a - tol || q[0] > b + tol {
                return Ok(f64::INFINITY);
            }
            return Ok(envelope::eval_chain(hx, hf, q[0].clamp(a, b)));
        }
        self.cloud.eval(q)
    }

    /// Envelope values at every grid node.
    pub fn node_hull_values(&self) -> Result<&[f64]> {
        if let Some(v) = self.node_hull.get() {
            return Ok(v);
        }
        let mut out = Vec::with_capacity(self.grid.len());
        for i in 0..self.grid.len() {
            out.push(self.eval(&self.grid.point(i))?);
        }
        Ok(self.node_hull.get_or_init(|| out))
    }

    /// Per-axis range of finite differences between adjacent finite samples;
    /// `(−∞, ∞)` on axes where no such pair exists.
    pub fn slope_box(&self) -> Vec<(f64, f64)> {
        let d = self.dim();
        let mut out = vec![(f64::INFINITY, f64::NEG_INFINITY); d];
        for (axis, range) in out.iter_mut().enumerate() {
            let ax = &self.grid.axes[axis];
            let stride = self.grid.stride(axis);
            let m = ax.len();
            for i in 0..self.values.len() {
                let pos = (i / stride) % m;
                if pos + 1 >= m {
                    continue;
                }
                let (a, b) = (self.values[i], self.values[i + stride]);
                if a.is_finite() && b.is_finite() {
                    let s = (b - a) / (ax[pos + 1] - ax[pos]);
                    range.0 = range.0.min(s);
                    range.1 = range.1.max(s);
                }
            }
            if range.0 > range.1 {
                *range = (f64::NEG_INFINITY, f64::INFINITY);
            }
        }
        out
    }

    /// Discrete conjugate `max_nodes ⟨p, s⟩ − f(p)` at one slope.
    pub fn conjugate_at(&self, s: &[f64]) -> f64 {
        self.cloud.conjugate_at(s)
    }

    /// Discrete conjugate on every node of `slopes`.
    pub fn conjugate_on(&self, slopes: &ProductGrid) -> Result<Vec<f64>> {
        if slopes.dim() != self.dim() {
            return Err(Error::dims("slope grid", self.dim(), slopes.dim()));
        }
        Ok(envelope::nested_transform(
            self.grid.axes(),
            &self.values,
            slopes.axes(),
        ))
    }

    /// Writes `coords…, value` rows with `+∞` as `inf`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (0..self.dim()).map(|k| format!("c{k}")).collect();
        header.push("value".into());
        w.write_record(&header).map_err(csv_err)?;
        for (i, v) in self.values.iter().enumerate() {
            let mut rec: Vec<String> = self.grid.point(i).iter().map(|c| c.to_string()).collect();
            rec.push(crate::extreal::ExtReal::from(*v).to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParameter(format!("csv output failed: {e}"))
}
