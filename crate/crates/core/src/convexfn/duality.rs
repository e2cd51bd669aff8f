//! Fenchel–Young gap, ε-subdifferentials and the Fenchel duality formula.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ConvexFunction, FnKind};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{self, Vector};
use crate::operators::PrimalDualPoint;
use crate::tolerance::{TolClass, TOL_DUAL_GRID};

/// `f(x) + f*(x*) − ⟨x, x*⟩`, which is `≥ 0` and vanishes exactly on the
/// graph of `∂f`.
pub fn fenchel_young_gap(f: &ConvexFunction, p: &PrimalDualPoint) -> Result<ExtReal> {
    if p.dim() != f.dim() {
        return Err(Error::dims("Fenchel–Young point", f.dim(), p.dim()));
    }
    let fx = f.eval(&p.x)?;
    let fs = f.conjugate()?.eval(&p.xstar)?;
    if !fx.is_finite() || !fs.is_finite() {
        return Ok(ExtReal::INFINITY);
    }
    Ok(ExtReal::from(fx.value() + fs.value() - p.duality_product()))
}

/// Whether `x* ∈ ∂_ε f(x)`, i.e. the Fenchel–Young gap is at most `ε`.
pub fn eps_subdiff_test(f: &ConvexFunction, p: &PrimalDualPoint, eps: f64) -> Result<bool> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be nonnegative, got {eps}")));
    }
    let gap = fenchel_young_gap(f, p)?;
    Ok(gap <= ExtReal::from(eps + f.tol_class().dual()))
}

#[derive(Debug, Clone, Serialize)]
pub struct DualitySolveReport {
    pub primal_value: ExtReal,
    pub primal_minimizer: Vector,
    pub dual_value: ExtReal,
    pub dual_maximizer: Vector,
    /// `primal_value − dual_value`.
    #[serde(serialize_with = "crate::extreal::serialize_f64")]
    pub gap: f64,
    /// Whether no nearby slope improves on the dual value at the maximizer.
    pub attainment_verified: bool,
    pub method: &'static str,
    pub iterations: usize,
    pub tol_class: TolClass,
}

fn dual_objective(f_conj: &ConvexFunction, g_conj: &ConvexFunction, s: &[f64]) -> Result<ExtReal> {
    let a = f_conj.eval(&linalg::scale(s, -1.0))?;
    let b = g_conj.eval(s)?;
    Ok(-a.checked_add(b)?)
}

fn primal_objective(f: &ConvexFunction, g: &ConvexFunction, x: &[f64]) -> Result<ExtReal> {
    f.eval(x)?.checked_add(g.eval(x)?)
}

/// Looks for a point where `g` is finite and `f` is finite in a small
/// neighbourhood, which makes `f` continuous there.
fn qualification_point(f: &ConvexFunction, g: &ConvexFunction) -> Result<Option<Vector>> {
    let n = f.dim();
    let mut candidates = vec![vec![0.0; n], f.domain_hint(), g.domain_hint()];
    let (hf, hg) = (f.domain_hint(), g.domain_hint());
    candidates.push(hf.iter().zip(&hg).map(|(a, b)| 0.5 * (a + b)).collect());
    if n <= 3 {
        let axis: Vec<f64> = (0..9).map(|i| -8.0 + 2.0 * i as f64).collect();
        let total = 9usize.pow(n as u32);
        for mut idx in 0..total {
            let mut p = vec![0.0; n];
            for c in p.iter_mut() {
                *c = axis[idx % 9];
                idx /= 9;
            }
            candidates.push(p);
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51);
        for _ in 0..500 {
            candidates.push((0..n).map(|_| rng.random_range(-8.0..8.0)).collect());
        }
    }
    let delta = 1e-3;
    for p in candidates {
        if !g.eval(&p)?.is_finite() || !f.eval(&p)?.is_finite() {
            continue;
        }
        let mut ok = true;
        'nbhd: for i in 0..n {
            for sign in [-1.0, 1.0] {
                let mut q = p.clone();
                q[i] += sign * delta;
                if !f.eval(&q)?.is_finite() {
                    ok = false;
                    break 'nbhd;
                }
            }
        }
        if ok {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn quadratic_parts(f: &ConvexFunction) -> Option<(&linalg::Matrix, &Vector, f64)> {
    match f.kind() {
        FnKind::Quadratic { a, b, c } if linalg::min_sym_eigenvalue(a) > 1e-12 => Some((a, b, *c)),
        _ => None,
    }
}

/// Checks that no slope within `δ` of `s` beats the reported dual value.
fn attainment_check(
    f_conj: &ConvexFunction,
    g_conj: &ConvexFunction,
    s: &[f64],
    value: ExtReal,
    tol: f64,
) -> Result<bool> {
    if !value.is_finite() || dual_objective(f_conj, g_conj, s)? != value {
        return Ok(false);
    }
    for delta in [1e-2, 1e-4] {
        for i in 0..s.len() {
            for sign in [-1.0, 1.0] {
                let mut q = s.to_vec();
                q[i] += sign * delta;
                if dual_objective(f_conj, g_conj, &q)? > value.add_finite(tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Solves `inf_x f(x) + g(x)` and `max_s −f*(−s) − g*(s)` and reports both.
///
/// Pairs of strictly convex quadratics use the normal equations; everything
/// else runs Douglas–Rachford splitting with the closed-form proximal maps
/// and reads the dual maximizer off the conjugate proximal maps.
pub fn fenchel_duality(f: &ConvexFunction, g: &ConvexFunction) -> Result<DualitySolveReport> {
    if f.dim() != g.dim() {
        return Err(Error::dims("Fenchel duality pair", f.dim(), g.dim()));
    }
    let n = f.dim();
    let class = f.tol_class().join(g.tol_class());
    if qualification_point(f, g)?.is_none() && qualification_point(g, f)?.is_none() {
        return Err(Error::QualificationFailed(
            "found no point of dom g where f is finite on a neighbourhood".into(),
        ));
    }
    let f_conj = f.conjugate()?;
    let g_conj = g.conjugate()?;

    if let (Some((a1, b1, _)), Some((a2, b2, _))) = (quadratic_parts(f), quadratic_parts(g)) {
        let sum = a1 + a2;
        let x = linalg::solve(&sum, &linalg::scale(&linalg::add(b1, b2), -1.0))
            .ok_or_else(|| Error::SolverFailure {
                message: "singular normal equations".into(),
                best_value: f64::NAN,
            })?;
        let i1 = linalg::spd_inverse(a1)?;
        let i2 = linalg::spd_inverse(a2)?;
        let rhs = linalg::sub(&linalg::mat_vec(&i2, b2), &linalg::mat_vec(&i1, b1));
        let s = linalg::solve(&(&i1 + &i2), &rhs).ok_or_else(|| Error::SolverFailure {
            message: "singular dual normal equations".into(),
            best_value: f64::NAN,
        })?;
        let primal = primal_objective(f, g, &x)?;
        let dual = dual_objective(&f_conj, &g_conj, &s)?;
        let attained = attainment_check(&f_conj, &g_conj, &s, dual, class.dual())?;
        return Ok(DualitySolveReport {
            primal_value: primal,
            primal_minimizer: x,
            dual_value: dual,
            gap: primal.value() - dual.value(),
            dual_maximizer: s,
            attainment_verified: attained,
            method: "normal-equations",
            iterations: 0,
            tol_class: class,
        });
    }

    // Douglas–Rachford with unit step.
    let ones = vec![1.0; n];
    let mut z = g.domain_hint();
    let mut x = f.prox(&z, &ones)?;
    let mut y = x.clone();
    let mut iterations = 0;
    let max_iter = 200_000;
    while iterations < max_iter {
        iterations += 1;
        x = f.prox(&z, &ones)?;
        let reflect: Vector = (0..n).map(|i| 2.0 * x[i] - z[i]).collect();
        y = g.prox(&reflect, &ones)?;
        let step: Vector = (0..n).map(|i| y[i] - x[i]).collect();
        for i in 0..n {
            z[i] += step[i];
        }
        let scale = 1.0 + linalg::norm_inf(&z);
        if linalg::norm_inf(&step) <= 1e-14 * scale {
            break;
        }
    }

    // Dual candidates from the conjugate proximal maps (each lies in the
    // domain of the respective conjugate).
    let u_f = f_conj.prox(&z, &ones)?;
    let reflect: Vector = (0..n).map(|i| 2.0 * x[i] - z[i]).collect();
    let s_g = g_conj.prox(&reflect, &ones)?;
    let neg_uf = linalg::scale(&u_f, -1.0);
    let mid: Vector = s_g.iter().zip(&neg_uf).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut best_dual: Option<(ExtReal, Vector)> = None;
    for s in [s_g, neg_uf, mid] {
        let v = dual_objective(&f_conj, &g_conj, &s)?;
        if v.is_finite() && best_dual.as_ref().is_none_or(|(b, _)| v > *b) {
            best_dual = Some((v, s));
        }
    }
    let mut best_primal: Option<(ExtReal, Vector)> = None;
    for p in [x, y] {
        let v = primal_objective(f, g, &p)?;
        if v.is_finite() && best_primal.as_ref().is_none_or(|(b, _)| v < *b) {
            best_primal = Some((v, p));
        }
    }
    let (Some((dual, s)), Some((primal, xmin))) = (best_dual, best_primal) else {
        return Err(Error::SolverFailure {
            message: "splitting did not produce finite primal and dual values".into(),
            best_value: f64::NAN,
        });
    };
    let gap = primal.value() - dual.value();
    if gap.abs() > TOL_DUAL_GRID * (1.0 + primal.value().abs()) {
        return Err(Error::SolverFailure {
            message: format!("duality gap {gap:e} after {iterations} iterations"),
            best_value: primal.value(),
        });
    }
    let attained = attainment_check(&f_conj, &g_conj, &s, dual, class.dual())?;
    Ok(DualitySolveReport {
        primal_value: primal,
        primal_minimizer: xmin,
        dual_value: dual,
        dual_maximizer: s,
        gap,
        attainment_verified: attained,
        method: "douglas-rachford",
        iterations,
        tol_class: class,
    })
}
