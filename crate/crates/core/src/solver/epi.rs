//! Proximal map of a finite max of affine functions.
//!
//! Solves `min_w  max_j (⟨g_j, w⟩ + e_j) + ½ (w − c)ᵀ K (w − c)` with `K`
//! diagonal positive, written as the quadratic program
//! `min t + ½‖w − c‖²_K  s.t.  ⟨g_j, w⟩ + e_j ≤ t`, by a primal active-set
//! method. The working set never holds more than `dim + 1` constraints.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone)]
pub struct MaxAffineProx {
    pub point: Vec<f64>,
    /// `max_j (⟨g_j, w⟩ + e_j)` at the returned point.
    pub level: f64,
    /// Convex weights of the active pieces (a subgradient certificate).
    pub weights: Vec<(usize, f64)>,
}

fn level_at(slopes: &[Vec<f64>], offsets: &[f64], w: &[f64]) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (j, (g, e)) in slopes.iter().zip(offsets).enumerate() {
        let v = linalg::dot(g, w) + e;
        if v > best {
            best = v;
            arg = j;
        }
    }
    (best, arg)
}

/// Solves the equality-constrained subproblem on the working set.
/// Returns `(w, t, multipliers)`.
fn solve_eqp(
    slopes: &[Vec<f64>],
    offsets: &[f64],
    work: &[usize],
    c: &[f64],
    k: &[f64],
) -> Option<(Vec<f64>, f64, Vec<f64>)> {
    let d = c.len();
    let m = work.len();
    let size = d + 1 + m;
    let mut a = Matrix::zeros(size, size);
    let mut rhs = vec![0.0; size];
    for i in 0..d {
        a[(i, i)] = k[i];
        rhs[i] = k[i] * c[i];
    }
    rhs[d] = -1.0;
    for (r, &j) in work.iter().enumerate() {
        let row = d + 1 + r;
        for i in 0..d {
            a[(i, row)] = slopes[j][i];
            a[(row, i)] = slopes[j][i];
        }
        a[(d, row)] = -1.0;
        a[(row, d)] = -1.0;
        rhs[row] = -offsets[j];
    }
    let sol = a.lu().solve(&nalgebra::DVector::from_vec(rhs))?;
    if !sol.iter().all(|v| v.is_finite()) {
        return None;
    }
    let w = sol.as_slice()[..d].to_vec();
    let t = sol[d];
    let lam = sol.as_slice()[d + 1..].to_vec();
    Some((w, t, lam))
}

pub fn prox_max_affine(
    slopes: &[Vec<f64>],
    offsets: &[f64],
    c: &[f64],
    k: &[f64],
) -> Result<MaxAffineProx> {
    if slopes.is_empty() {
        return Err(Error::Improper("max of an empty family of affine functions".into()));
    }
    let d = c.len();
    let mut w = c.to_vec();
    let (mut t, first) = level_at(slopes, offsets, &w);
    let mut work = vec![first];
    let scale = 1.0
        + slopes
            .iter()
            .flat_map(|g| g.iter())
            .fold(0.0_f64, |m, x| m.max(x.abs()));
    let max_iter = 20 * (slopes.len() + d) + 200;

    for _ in 0..max_iter {
        let Some((w_eq, t_eq, lam)) = solve_eqp(slopes, offsets, &work, c, k) else {
            // Dependent working set: drop the newest constraint and retry.
            work.pop();
            if work.is_empty() {
                break;
            }
            continue;
        };
        let pw: Vec<f64> = w_eq.iter().zip(&w).map(|(a, b)| a - b).collect();
        let pt = t_eq - t;
        let step_norm = linalg::norm_inf(&pw).max(pt.abs());

        if step_norm <= 1e-14 * (1.0 + linalg::norm_inf(&w).max(t.abs())) {
            let (most_neg, idx) = lam
                .iter()
                .enumerate()
                .fold((0.0, usize::MAX), |(m, i), (r, &l)| if l < m { (l, r) } else { (m, i) });
            if most_neg >= -1e-12 || work.len() == 1 {
                let (level, _) = level_at(slopes, offsets, &w);
                let weights = work.iter().copied().zip(lam).collect();
                return Ok(MaxAffineProx {
                    point: w,
                    level,
                    weights,
                });
            }
            work.remove(idx);
            continue;
        }

        // Ratio test over constraints outside the working set.
        let mut alpha = 1.0;
        let mut blocking = None;
        for (j, (g, e)) in slopes.iter().zip(offsets).enumerate() {
            if work.contains(&j) {
                continue;
            }
            let rate = linalg::dot(g, &pw) - pt;
            if rate > 1e-13 * scale * (1.0 + step_norm) {
                let slack = (t - (linalg::dot(g, &w) + e)).max(0.0);
                let a = slack / rate;
                if a < alpha {
                    alpha = a;
                    blocking = Some(j);
                }
            }
        }
        for i in 0..d {
            w[i] += alpha * pw[i];
        }
        t += alpha * pt;
        if let Some(j) = blocking {
            if work.len() == d + 1 {
                // The working set is already a full basis; restart from the
                // exact level to shed accumulated rounding.
                let (lvl, arg) = level_at(slopes, offsets, &w);
                t = lvl;
                work = vec![arg];
            } else {
                work.push(j);
            }
        }
    }
    let (level, _) = level_at(slopes, offsets, &w);
    Err(Error::SolverFailure {
        message: "active-set iteration limit in max-affine prox".into(),
        best_value: level + 0.5 * w.iter().zip(c).zip(k).map(|((a, b), ki)| ki * (a - b) * (a - b)).sum::<f64>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn objective(slopes: &[Vec<f64>], offsets: &[f64], c: &[f64], k: &[f64], w: &[f64]) -> f64 {
        let (lvl, _) = level_at(slopes, offsets, w);
        lvl + 0.5 * w.iter().zip(c).zip(k).map(|((a, b), ki)| ki * (a - b) * (a - b)).sum::<f64>()
    }

    #[test]
    fn abs_value_soft_threshold() {
        // max(w, -w) = |w|, prox at 2 with unit weight → 1.
        let slopes = vec![vec![1.0], vec![-1.0]];
        let offsets = vec![0.0, 0.0];
        let r = prox_max_affine(&slopes, &offsets, &[2.0], &[1.0]).unwrap();
        assert!((r.point[0] - 1.0).abs() < 1e-12);
        let r = prox_max_affine(&slopes, &offsets, &[0.3], &[1.0]).unwrap();
        assert!(r.point[0].abs() < 1e-12);
    }

    #[test]
    fn l1_norm_in_two_dims_against_brute_force() {
        let mut slopes = Vec::new();
        for a in [-1.0, 1.0] {
            for b in [-1.0, 1.0] {
                slopes.push(vec![a, b]);
            }
        }
        let offsets = vec![0.0; 4];
        let c = [1.7, -0.4];
        let k = [1.0, 2.0];
        let r = prox_max_affine(&slopes, &offsets, &c, &k).unwrap();
        // Separable closed form: soft threshold by 1/k_i.
        assert!((r.point[0] - 0.7).abs() < 1e-12);
        assert!(r.point[1].abs() < 1e-12);
        let best = objective(&slopes, &offsets, &c, &k, &r.point);
        for i in -20..=20 {
            for j in -20..=20 {
                let w = [r.point[0] + i as f64 * 1e-3, r.point[1] + j as f64 * 1e-3];
                assert!(objective(&slopes, &offsets, &c, &k, &w) >= best - 1e-12);
            }
        }
    }
}
