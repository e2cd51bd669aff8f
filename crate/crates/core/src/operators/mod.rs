//! Monotone operators `T : R^n ⇉ R^n` and tests on their graphs.

mod graph;
mod operator;
mod point;

pub use operator::{
    eps_enlargement_test, monotonicity_check, EnlargementReport, MonotoneOperator,
    MonotonicityReport, OperatorKind,
};
pub use point::{duality_product, DualSet, NormWeight, PrimalDualPoint};
