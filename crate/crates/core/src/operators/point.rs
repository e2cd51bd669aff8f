use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::linalg::{self, Vector};

/// A pair `(x, x*)` in `R^n × R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualPoint {
    pub x: Vector,
    pub xstar: Vector,
}

impl PrimalDualPoint {
    pub fn new(x: Vector, xstar: Vector) -> Result<Self> {
        if x.len() != xstar.len() {
            return Err(Error::dims("dual component", x.len(), xstar.len()));
        }
        if x.is_empty() {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if x.iter().chain(&xstar).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("point coordinates must be finite".into()));
        }
        Ok(PrimalDualPoint { x, xstar })
    }

    pub fn zero(n: usize) -> Self {
        PrimalDualPoint {
            x: vec![0.0; n],
            xstar: vec![0.0; n],
        }
    }

    /// Splits a vector of length `2n` into `(x, x*)`.
    pub fn from_stacked(w: &[f64]) -> Self {
        let n = w.len() / 2;
        PrimalDualPoint {
            x: w[..n].to_vec(),
            xstar: w[n..].to_vec(),
        }
    }

    pub fn stacked(&self) -> Vector {
        let mut w = self.x.clone();
        w.extend_from_slice(&self.xstar);
        w
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `⟨x, x*⟩`.
    pub fn duality_product(&self) -> f64 {
        linalg::dot(&self.x, &self.xstar)
    }

    pub fn add(&self, other: &PrimalDualPoint) -> PrimalDualPoint {
        PrimalDualPoint {
            x: linalg::add(&self.x, &other.x),
            xstar: linalg::add(&self.xstar, &other.xstar),
        }
    }

    pub fn sub(&self, other: &PrimalDualPoint) -> PrimalDualPoint {
        PrimalDualPoint {
            x: linalg::sub(&self.x, &other.x),
            xstar: linalg::sub(&self.xstar, &other.xstar),
        }
    }

    /// `(x*, x)`.
    pub fn transposed(&self) -> PrimalDualPoint {
        PrimalDualPoint {
            x: self.xstar.clone(),
            xstar: self.x.clone(),
        }
    }

    /// Euclidean distance in `R^n × R^n`.
    pub fn distance(&self, other: &PrimalDualPoint) -> f64 {
        linalg::norm(&self.sub(other).stacked())
    }
}

/// `⟨x, x*⟩` for a point.
pub fn duality_product(p: &PrimalDualPoint) -> f64 {
    p.duality_product()
}

/// Rescaled norm `|||x||| = s‖x‖` on the primal space with the induced dual
/// norm `‖x*‖ / s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormWeight {
    s: f64,
}

impl NormWeight {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("norm scale must be positive, got {s}")));
        }
        Ok(NormWeight { s })
    }

    pub const UNIT: NormWeight = NormWeight { s: 1.0 };

    pub fn s(self) -> f64 {
        self.s
    }

    /// Coordinates in which the weighted norms become Euclidean:
    /// `(s x, x*/s)`. Leaves the duality product unchanged.
    pub fn to_scaled(self, p: &PrimalDualPoint) -> PrimalDualPoint {
        PrimalDualPoint {
            x: linalg::scale(&p.x, self.s),
            xstar: linalg::scale(&p.xstar, 1.0 / self.s),
        }
    }

    pub fn from_scaled(self, p: &PrimalDualPoint) -> PrimalDualPoint {
        PrimalDualPoint {
            x: linalg::scale(&p.x, 1.0 / self.s),
            xstar: linalg::scale(&p.xstar, self.s),
        }
    }

    pub fn primal_norm(self, v: &[f64]) -> f64 {
        self.s * linalg::norm(v)
    }

    pub fn dual_norm(self, v: &[f64]) -> f64 {
        linalg::norm(v) / self.s
    }
}

/// A set of dual vectors returned by point-to-set evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum DualSet {
    Empty,
    /// The box `Π [lo_i, hi_i]`; bounds may be infinite, and `lo = hi`
    /// encodes a single point.
    Box { lo: Vector, hi: Vector },
    /// Finitely many points.
    Finite(Vec<Vector>),
}

impl DualSet {
    pub fn point(v: Vector) -> Self {
        DualSet::Box {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            DualSet::Empty => true,
            DualSet::Finite(v) => v.is_empty(),
            DualSet::Box { .. } => false,
        }
    }

    pub fn contains(&self, s: &[f64], tol: f64) -> bool {
        match self {
            DualSet::Empty => false,
            DualSet::Box { lo, hi } => s
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol),
            DualSet::Finite(pts) => pts.iter().any(|p| linalg::norm_inf(&linalg::sub(p, s)) <= tol),
        }
    }

    /// Nearest member to `s` (Euclidean), if any.
    pub fn nearest(&self, s: &[f64]) -> Option<Vector> {
        match self {
            DualSet::Empty => None,
            DualSet::Box { lo, hi } => Some(
                s.iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            ),
            DualSet::Finite(pts) => pts
                .iter()
                .min_by(|a, b| linalg::dist(a, s).total_cmp(&linalg::dist(b, s)))
                .cloned(),
        }
    }

    pub fn shifted(self, a: &[f64]) -> DualSet {
        match self {
            DualSet::Empty => DualSet::Empty,
            DualSet::Box { lo, hi } => DualSet::Box {
                lo: linalg::add(&lo, a),
                hi: linalg::add(&hi, a),
            },
            DualSet::Finite(pts) => DualSet::Finite(pts.iter().map(|p| linalg::add(p, a)).collect()),
        }
    }

    /// Cartesian product of boxes on consecutive coordinate blocks.
    pub fn product(parts: &[DualSet]) -> Result<DualSet> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for p in parts {
            match p {
                DualSet::Empty => return Ok(DualSet::Empty),
                DualSet::Box { lo: l, hi: h } => {
                    lo.extend_from_slice(l);
                    hi.extend_from_slice(h);
                }
                DualSet::Finite(_) => {
                    return Err(Error::Unsupported("product of finite dual sets".into()))
                }
            }
        }
        Ok(DualSet::Box { lo, hi })
    }
}

fn ext_vec(v: &[f64]) -> Vec<ExtReal> {
    v.iter().map(|x| ExtReal::from(*x)).collect()
}

impl Serialize for DualSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DualSet::Empty => {
                let mut st = s.serialize_struct("DualSet", 1)?;
                st.serialize_field("kind", "empty")?;
                st.end()
            }
            DualSet::Box { lo, hi } if lo == hi => {
                let mut st = s.serialize_struct("DualSet", 2)?;
                st.serialize_field("kind", "point")?;
                st.serialize_field("point", lo)?;
                st.end()
            }
            DualSet::Box { lo, hi } => {
                let mut st = s.serialize_struct("DualSet", 3)?;
                st.serialize_field("kind", "box")?;
                st.serialize_field("lo", &ext_vec(lo))?;
                st.serialize_field("hi", &ext_vec(hi))?;
                st.end()
            }
            DualSet::Finite(pts) => {
                let mut st = s.serialize_struct("DualSet", 2)?;
                st.serialize_field("kind", "finite")?;
                st.serialize_field("points", pts)?;
                st.end()
            }
        }
    }
}
