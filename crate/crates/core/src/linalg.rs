//! Dense vector and matrix helpers over `Vec<f64>` and `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Vector = Vec<f64>;
pub type Matrix = DMatrix<f64>;

/// Relative threshold below which singular values count as zero.
const RANK_TOL: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn mat_vec(a: &Matrix, v: &[f64]) -> Vector {
    debug_assert_eq!(a.ncols(), v.len());
    let mut out = vec![0.0; a.nrows()];
    for j in 0..a.ncols() {
        let vj = v[j];
        if vj != 0.0 {
            for (i, o) in out.iter_mut().enumerate() {
                *o += a[(i, j)] * vj;
            }
        }
    }
    out
}

pub fn mat_t_vec(a: &Matrix, v: &[f64]) -> Vector {
    debug_assert_eq!(a.nrows(), v.len());
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)] * v[i]).sum())
        .collect()
}

/// `½ vᵀ A v`.
pub fn half_quad(a: &Matrix, v: &[f64]) -> f64 {
    0.5 * dot(v, &mat_vec(a, v))
}

pub fn symmetrize(a: &Matrix) -> Matrix {
    (a + a.transpose()) * 0.5
}

pub fn identity(n: usize) -> Matrix {
    DMatrix::identity(n, n)
}

/// Matrix from row-major nested vectors; rows must have equal length.
pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::dims("matrix row", ncols, bad.len()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn to_rows(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_sym_eigenvalue(a: &Matrix) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    symmetrize(a)
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, &x| m.min(x))
}

fn scale_of(a: &Matrix) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0)
}

/// Checks `A + Aᵀ ⪰ 0` up to a relative tolerance.
pub fn check_psd(a: &Matrix) -> Result<()> {
    let lam = min_sym_eigenvalue(a);
    if lam < -1e-10 * scale_of(a) {
        Err(Error::NotPositiveSemidefinite { min_eigenvalue: lam })
    } else {
        Ok(())
    }
}

/// Pseudo-inverse of a symmetric matrix and an orthonormal basis of its
/// kernel (as columns).
pub fn sym_pinv_and_kernel(s: &Matrix) -> (Matrix, Matrix) {
    let n = s.nrows();
    let eig = symmetrize(s).symmetric_eigen();
    let cutoff = RANK_TOL * eig.eigenvalues.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let mut pinv = DMatrix::zeros(n, n);
    let mut kernel_cols = Vec::new();
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        if lam.abs() > cutoff {
            pinv += (v * v.transpose()) / lam;
        } else {
            kernel_cols.push(v.into_owned());
        }
    }
    let kernel = if kernel_cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&kernel_cols)
    };
    (pinv, kernel)
}

/// Orthonormal bases of the row space and the kernel of `c`.
///
/// Returns `(row_basis, kernel_basis)` with basis vectors as columns, so
/// `c x = 0` iff `x` lies in the span of the kernel columns.
pub fn row_space_and_kernel(c: &Matrix) -> (Matrix, Matrix) {
    let n = c.ncols();
    if c.nrows() == 0 {
        return (DMatrix::zeros(n, 0), identity(n));
    }
    // Eigen-decomposition of CᵀC separates row space and kernel.
    let gram = c.transpose() * c;
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let cutoff = RANK_TOL * top.max(1.0);
    let mut row = Vec::new();
    let mut ker = Vec::new();
    for k in 0..n {
        let v = eig.eigenvectors.column(k).into_owned();
        if eig.eigenvalues[k] > cutoff {
            row.push(v);
        } else {
            ker.push(v);
        }
    }
    let mk = |cols: Vec<DVector<f64>>| {
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    (mk(row), mk(ker))
}

/// Solves a square system, falling back to a least-squares solution when the
/// matrix is singular. Returns `None` if the residual of the fallback is
/// not small.
pub fn solve(a: &Matrix, b: &[f64]) -> Option<Vector> {
    let rhs = DVector::from_column_slice(b);
    if let Some(x) = a.clone().lu().solve(&rhs) {
        if x.iter().all(|v| v.is_finite()) {
            return Some(x.as_slice().to_vec());
        }
    }
    let svd = a.clone().svd(true, true);
    let eps = RANK_TOL * svd.singular_values.max().max(1.0);
    let x = svd.solve(&rhs, eps).ok()?;
    let resid = (a * &x - &rhs).norm();
    if resid <= 1e-8 * (1.0 + rhs.norm()) {
        Some(x.as_slice().to_vec())
    } else {
        None
    }
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    let lam = min_sym_eigenvalue(a);
    if lam <= 1e-12 * scale_of(a) {
        return Err(Error::Unsupported(format!(
            "matrix is singular (smallest eigenvalue {lam:e})"
        )));
    }
    symmetrize(a)
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveSemidefinite { min_eigenvalue: lam })
}
