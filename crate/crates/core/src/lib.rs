//! Convex representations of maximal monotone operators in `R^n`.
//!
//! The crate evaluates Fitzpatrick functions and the largest member of the
//! Fitzpatrick family, conjugates convex functions and bifunctions on
//! `R^n × R^n`, verifies the dual representability condition
//! `h ≥ π`, `h* ≥ π`, and runs the constructive Brønsted–Rockafellar
//! refinement that turns an approximate zero of `h − π` into an exact one.
//!
//! The primal space, its dual and its bidual are all `R^n` with the
//! Euclidean pairing, so the canonical injection into the bidual is the
//! identity.
//!
//! Modules:
//! - [`operators`]: monotone operators, graph samples, ε-enlargements.
//! - [`convexfn`]: convex functions, Fenchel conjugation, Fenchel duality.
//! - [`representations`]: bifunctions `h(x, x*)` and the checks on them.
//! - [`refine`]: regularized minimization and the refinement iteration.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexfn;
pub mod error;
pub mod extreal;
pub mod grid;
pub mod linalg;
pub mod operators;
pub mod refine;
pub mod representations;
pub mod solver;
pub mod tolerance;

pub use convexfn::{ConvexFunction, DualitySolveReport};
pub use error::{Error, ErrorClass, Result};
pub use extreal::ExtReal;
pub use grid::{GridFn, PointCloud, ProductGrid};
pub use linalg::Vector;
pub use operators::{DualSet, MonotoneOperator, NormWeight, PrimalDualPoint};
pub use refine::{RefinementTrace, RegularizedSolution};
pub use representations::{Bifunction, ConditionReport, TestSet};
pub use tolerance::TolClass;
