//! One-dimensional lower hulls and discrete Legendre transforms on
//! product grids.

/// Vertices of the lower convex hull of `(xs[i], fs[i])` over finite `fs`.
///
/// `xs` must be strictly increasing. Returns indices into the input.
pub fn lower_hull_1d(xs: &[f64], fs: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        if !fs[i].is_finite() {
            continue;
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it lies on or above the chord a → i.
            let cross = (xs[b] - xs[a]) * (fs[i] - fs[a]) - (fs[b] - fs[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Evaluates the piecewise-linear hull with vertices `(hx, hf)` at `x`;
/// `+∞` outside `[hx[0], hx[last]]`.
pub fn eval_chain(hx: &[f64], hf: &[f64], x: f64) -> f64 {
    let n = hx.len();
    if n == 0 || x < hx[0] || x > hx[n - 1] {
        return f64::INFINITY;
    }
    if n == 1 {
        return hf[0];
    }
    let k = hx.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (hx[k - 1], hx[k]);
    let t = (x - x0) / (x1 - x0);
    hf[k - 1] + t * (hf[k] - hf[k - 1])
}

/// `out[k] = max_j (xs[j]·slopes[k] + vals[j])`, skipping `vals[j] = −∞`.
pub fn line_max(xs: &[f64], vals: &[f64], slopes: &[f64], out: &mut [f64]) {
    for (o, &s) in out.iter_mut().zip(slopes) {
        let mut best = f64::NEG_INFINITY;
        for (&x, &v) in xs.iter().zip(vals) {
            if v > f64::NEG_INFINITY {
                let c = x * s + v;
                if c > best {
                    best = c;
                }
            }
        }
        *o = best;
    }
}

/// Discrete conjugate `f*(s) = max_x ⟨x, s⟩ − f(x)` of samples on the
/// product grid `axes` (row-major, last axis fastest), evaluated on the
/// product grid `slope_axes`.
///
/// The maximum over the grid is computed one axis at a time, which is
/// exact because the objective is separable in the grid coordinates of a
/// single axis once the others are fixed. `+∞` samples are skipped; if all
/// samples are `+∞` the result is `−∞` everywhere.
pub fn nested_transform(axes: &[Vec<f64>], values: &[f64], slope_axes: &[Vec<f64>]) -> Vec<f64> {
    let d = axes.len();
    assert_eq!(slope_axes.len(), d);
    let mut shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let mut cur: Vec<f64> = values.iter().map(|v| -v).collect();
    for axis in 0..d {
        let m_in = shape[axis];
        let m_out = slope_axes[axis].len();
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let mut next = vec![f64::NEG_INFINITY; outer * m_out * inner];
        let mut line = vec![0.0; m_in];
        let mut res = vec![0.0; m_out];
        for o in 0..outer {
            for i in 0..inner {
                for j in 0..m_in {
                    line[j] = cur[(o * m_in + j) * inner + i];
                }
                line_max(&axes[axis], &line, &slope_axes[axis], &mut res);
                for k in 0..m_out {
                    next[(o * m_out + k) * inner + i] = res[k];
                }
            }
        }
        shape[axis] = m_out;
        cur = next;
    }
    cur
}
