//! Small dense numerical solvers used by the grid-backed kinds.

pub mod envelope;
pub mod epi;
pub mod lp;
