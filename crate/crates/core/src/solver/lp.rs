//! Dense two-phase simplex method for `min cᵀλ  s.t.  Aλ = b, λ ≥ 0`.
//!
//! Sized for the convex-hull evaluation problems of grid functions: few
//! rows (dimension + 1), many columns.

const PIVOT_TOL: f64 = 1e-11;
const DEGENERATE_SWITCH: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, solution: Vec<f64> },
    Infeasible { residual: f64 },
    Unbounded,
    /// The pivot budget ran out; carries the last objective value.
    IterationLimit { value: f64 },
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width - 1]
    }

    fn pivot(&mut self, r: usize, col: usize, cost: &mut [f64], obj: &mut f64) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[col];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let f = cost[col];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&prow[..self.width - 1]) {
                *v -= f * pv;
            }
            *obj -= f * prow[self.width - 1];
        }
        self.basis[r] = col;
    }

    /// Runs simplex pivots on reduced costs `cost` over columns `allowed`.
    fn optimize(
        &mut self,
        cost: &mut [f64],
        obj: &mut f64,
        allowed: usize,
        max_iter: usize,
    ) -> Result<(), bool> {
        let mut degenerate = 0usize;
        for _ in 0..max_iter {
            let bland = degenerate > DEGENERATE_SWITCH;
            let mut enter = None;
            let mut best = -1e-10;
            for (j, &rc) in cost[..allowed].iter().enumerate() {
                if rc < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(col) = enter else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else { return Err(true) };
            if ratio <= 1e-15 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, col, cost, obj);
        }
        Err(false)
    }
}

/// Solves `min cᵀλ` subject to `Aλ = b`, `λ ≥ 0`, with `A` given by rows.
pub fn solve(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let width = n + m + 1;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = 1.0;
        row[width - 1] = sign * b[i];
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
    };
    let max_iter = 50 * (n + m) + 1000;

    // Phase 1: minimize the sum of artificials.
    let mut cost = vec![0.0; n + m];
    let mut obj = 0.0;
    for row in &tab.rows {
        for j in 0..n {
            cost[j] -= row[j];
        }
        obj -= row[width - 1];
    }
    match tab.optimize(&mut cost, &mut obj, n + m, max_iter) {
        Ok(()) => {}
        Err(_) => return LpOutcome::IterationLimit { value: f64::INFINITY },
    }
    let scale = 1.0 + b.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
    if -obj > 1e-9 * scale {
        return LpOutcome::Infeasible { residual: -obj };
    }
    // Drive artificials out of the basis where possible.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| tab.rows[r][j].abs() > 1e-9) {
                let mut dummy = vec![0.0; n + m];
                let mut dobj = 0.0;
                tab.pivot(r, col, &mut dummy, &mut dobj);
            }
        }
    }

    // Phase 2 with the true costs; artificials never re-enter.
    let mut cost = vec![0.0; n + m];
    cost[..n].copy_from_slice(c);
    let mut obj = 0.0;
    for (r, row) in tab.rows.iter().enumerate() {
        let cb = if tab.basis[r] < n { c[tab.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..n + m {
                cost[j] -= cb * row[j];
            }
            obj -= cb * row[width - 1];
        }
    }
    match tab.optimize(&mut cost, &mut obj, n, max_iter) {
        Ok(()) => {}
        Err(true) => return LpOutcome::Unbounded,
        Err(false) => return LpOutcome::IterationLimit { value: -obj },
    }
    let mut solution = vec![0.0; n];
    for (r, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            solution[bv] = tab.rhs(r).max(0.0);
        }
    }
    let value = c.iter().zip(&solution).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { value, solution }
}

/// Value at `q` of the lower convex envelope of the finite point cloud
/// `{(p_j, f_j)}`; `+∞` outside the convex hull of the `p_j`.
pub fn hull_value(points: &[Vec<f64>], values: &[f64], q: &[f64]) -> Option<f64> {
    let d = q.len();
    let mut a = vec![vec![0.0; points.len()]; d + 1];
    for (j, p) in points.iter().enumerate() {
        for k in 0..d {
            a[k][j] = p[k];
        }
        a[d][j] = 1.0;
    }
    let mut b = q.to_vec();
    b.push(1.0);
    match solve(&a, &b, values) {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible { .. } => Some(f64::INFINITY),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + y + s = 1 ; all >= 0  → value -1
        let a = vec![vec![1.0, 1.0, 1.0]];
        match solve(&a, &[1.0], &[-1.0, -1.0, 0.0]) {
            LpOutcome::Optimal { value, .. } => assert!((value + 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![1.0, 1.0]];
        assert!(matches!(
            solve(&a, &[-1.0], &[0.0, 0.0]),
            LpOutcome::Infeasible { .. }
        ));
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(solve(&a, &[0.0], &[-1.0, 0.0]), LpOutcome::Unbounded);
    }

    #[test]
    fn hull_of_square_corners() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ];
        // f = x + y at corners except a dip at (1,1).
        let vals = vec![0.0, 1.0, 1.0, 0.0];
        let v = hull_value(&pts, &vals, &[0.5, 0.5]).unwrap();
        assert!(v.abs() < 1e-12);
        let v = hull_value(&pts, &vals, &[1.0, 0.5]).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(hull_value(&pts, &vals, &[1.5, 0.5]).unwrap(), f64::INFINITY);
    }
}
