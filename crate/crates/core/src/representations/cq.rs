//! Quadratics restricted to affine subspaces:
//! `h(w) = ½ wᵀQw + ⟨l, w⟩ + k + δ{Cw = d}`, and their conjugates.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector};

#[derive(Debug)]
struct DualData {
    /// Minimum-norm point of the constraint set.
    w0: Vector,
    /// Orthonormal basis of `ker C` (columns).
    z: Matrix,
    /// `(ZᵀQZ)⁺` and an orthonormal basis of `ker ZᵀQZ`.
    r_pinv: Matrix,
    r_kernel: Matrix,
    /// Whether the quadratic is convex on the constraint set.
    convex: bool,
}

#[derive(Debug)]
pub struct ConstrainedQuadratic {
    q: Matrix,
    l: Vector,
    k: f64,
    /// Constraint rows, orthonormalized at construction.
    c: Matrix,
    d: Vector,
    dual: OnceLock<DualData>,
}

impl Clone for ConstrainedQuadratic {
    fn clone(&self) -> Self {
        ConstrainedQuadratic {
            q: self.q.clone(),
            l: self.l.clone(),
            k: self.k,
            c: self.c.clone(),
            d: self.d.clone(),
            dual: OnceLock::new(),
        }
    }
}

impl PartialEq for ConstrainedQuadratic {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.l == other.l && self.k == other.k && self.c == other.c && self.d == other.d
    }
}

fn feas_tol(w: &[f64]) -> f64 {
    1e-9 * (1.0 + linalg::norm_inf(w))
}

impl ConstrainedQuadratic {
    /// Builds the function; `c` may have dependent rows. Fails if the
    /// constraint set is empty.
    pub fn new(q: Matrix, l: Vector, k: f64, c: Matrix, d: Vector) -> Result<Self> {
        let m = l.len();
        if q.nrows() != m || q.ncols() != m {
            return Err(Error::dims("quadratic form matrix", m, q.nrows()));
        }
        if c.ncols() != m && c.nrows() > 0 {
            return Err(Error::dims("constraint matrix columns", m, c.ncols()));
        }
        if c.nrows() != d.len() {
            return Err(Error::dims("constraint right-hand side", c.nrows(), d.len()));
        }
        if q.iter().chain(&l).chain(c.iter()).chain(&d).any(|v| !v.is_finite()) || !k.is_finite() {
            return Err(Error::InvalidParameter("quadratic form coefficients must be finite".into()));
        }
        let q = linalg::symmetrize(&q);
        let (c, d) = if c.nrows() == 0 {
            (Matrix::zeros(0, m), Vec::new())
        } else {
            let (rows, _) = linalg::row_space_and_kernel(&c);
            let svd = c.clone().svd(true, true);
            let rhs = nalgebra::DVector::from_column_slice(&d);
            let w0 = svd
                .solve(&rhs, 1e-10 * svd.singular_values.max().max(1.0))
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let resid = (&c * &w0 - &rhs).norm();
            if resid > 1e-9 * (1.0 + rhs.norm()) {
                return Err(Error::Improper("constraint set of the quadratic form is empty".into()));
            }
            let c_new = rows.transpose();
            let d_new = linalg::mat_vec(&c_new, w0.as_slice());
            (c_new, d_new)
        };
        Ok(ConstrainedQuadratic {
            q,
            l,
            k,
            c,
            d,
            dual: OnceLock::new(),
        })
    }

    pub fn unconstrained(q: Matrix, l: Vector, k: f64) -> Result<Self> {
        let m = l.len();
        ConstrainedQuadratic::new(q, l, k, Matrix::zeros(0, m), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.l.len()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn constraints(&self) -> (&Matrix, &[f64]) {
        (&self.c, &self.d)
    }

    pub fn feasible(&self, w: &[f64]) -> bool {
        if self.c.nrows() == 0 {
            return true;
        }
        let r = linalg::sub(&linalg::mat_vec(&self.c, w), &self.d);
        linalg::norm_inf(&r) <= feas_tol(w)
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        if !self.feasible(w) {
            return f64::INFINITY;
        }
        linalg::half_quad(&self.q, w) + linalg::dot(&self.l, w) + self.k
    }

    fn dual_data(&self) -> &DualData {
        self.dual.get_or_init(|| {
            let m = self.dim();
            let w0 = linalg::mat_t_vec(&self.c, &self.d);
            let z = if self.c.nrows() == 0 {
                linalg::identity(m)
            } else {
                linalg::row_space_and_kernel(&self.c).1
            };
            let r = z.transpose() * &self.q * &z;
            let (r_pinv, r_kernel) = linalg::sym_pinv_and_kernel(&r);
            let scale = self.q.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
            let convex = r.nrows() == 0 || linalg::min_sym_eigenvalue(&r) >= -1e-10 * scale;
            DualData {
                w0,
                z,
                r_pinv,
                r_kernel,
                convex,
            }
        })
    }

    /// Whether the quadratic is convex on its constraint set.
    pub fn is_convex(&self) -> bool {
        self.dual_data().convex
    }

    /// `h*(q) = sup_w ⟨q, w⟩ − h(w)`.
    pub fn eval_conjugate(&self, qv: &[f64]) -> f64 {
        let dd = self.dual_data();
        if !dd.convex {
            return f64::INFINITY;
        }
        let qw0 = linalg::mat_vec(&self.q, &dd.w0);
        let resid: Vector = (0..self.dim()).map(|i| qv[i] - self.l[i] - qw0[i]).collect();
        let g = linalg::mat_t_vec(&dd.z, &resid);
        if dd.r_kernel.ncols() > 0 {
            let off = linalg::mat_t_vec(&dd.r_kernel, &g);
            let tol = 1e-9 * (1.0 + linalg::norm_inf(qv) + linalg::norm_inf(&g));
            if linalg::norm_inf(&off) > tol {
                return f64::INFINITY;
            }
        }
        let base = linalg::dot(&linalg::sub(qv, &self.l), &dd.w0) - 0.5 * linalg::dot(&dd.w0, &qw0) - self.k;
        base + linalg::half_quad(&dd.r_pinv, &g)
    }

    /// `argmin_w h(w) + ½ Σ m_i (w_i − v_i)²`.
    pub fn prox(&self, v: &[f64], m: &[f64]) -> Result<Vector> {
        let n = self.dim();
        let r = self.c.nrows();
        let mut a = Matrix::zeros(n + r, n + r);
        let mut rhs = vec![0.0; n + r];
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = self.q[(i, j)];
            }
            a[(i, i)] += m[i];
            rhs[i] = m[i] * v[i] - self.l[i];
        }
        for row in 0..r {
            for j in 0..n {
                a[(n + row, j)] = self.c[(row, j)];
                a[(j, n + row)] = self.c[(row, j)];
            }
            rhs[n + row] = self.d[row];
        }
        let sol = linalg::solve(&a, &rhs).ok_or_else(|| Error::SolverFailure {
            message: "singular optimality system in quadratic prox".into(),
            best_value: f64::NAN,
        })?;
        Ok(sol[..n].to_vec())
    }

    /// `w ↦ h(Pw + t) + ⟨a, w⟩ + κ` as a new constrained quadratic.
    pub fn precompose(&self, p: &Matrix, t: &[f64], a: &[f64], kappa: f64) -> Result<Self> {
        let qt = linalg::mat_vec(&self.q, t);
        let q_new = p.transpose() * &self.q * p;
        let l_inner = linalg::add(&qt, &self.l);
        let l_new = linalg::add(&linalg::mat_t_vec(p, &l_inner), a);
        let k_new = 0.5 * linalg::dot(t, &qt) + linalg::dot(&self.l, t) + self.k + kappa;
        let c_new = &self.c * p;
        let d_new = linalg::sub(&self.d, &linalg::mat_vec(&self.c, t));
        ConstrainedQuadratic::new(q_new, l_new, k_new, c_new, d_new)
    }

    /// `(u, v) ↦ f(u) + g(v)` on the concatenated space.
    pub fn direct_sum(f: &Self, g: &Self) -> Result<Self> {
        let (n1, n2) = (f.dim(), g.dim());
        let n = n1 + n2;
        let mut q = Matrix::zeros(n, n);
        q.view_mut((0, 0), (n1, n1)).copy_from(&f.q);
        q.view_mut((n1, n1), (n2, n2)).copy_from(&g.q);
        let mut l = f.l.clone();
        l.extend_from_slice(&g.l);
        let (r1, r2) = (f.c.nrows(), g.c.nrows());
        let mut c = Matrix::zeros(r1 + r2, n);
        c.view_mut((0, 0), (r1, n1)).copy_from(&f.c);
        c.view_mut((r1, n1), (r2, n2)).copy_from(&g.c);
        let mut d = f.d.clone();
        d.extend_from_slice(&g.d);
        ConstrainedQuadratic::new(q, l, f.k + g.k, c, d)
    }
}
