//! Constructive Brønsted–Rockafellar refinement.
//!
//! Given a bifunction `h` with `h ≥ π` and `h* ≥ π`, a point `p` with a
//! small gap `h(p) − π(p)` is moved to a point where the gap vanishes,
//! with explicit bounds on how far each component travels.

mod iteration;
mod probe;
mod regularized;

pub use iteration::{br_refine, br_refine_scaled, br_step, RefinementTrace, TraceSummary, MAX_STEPS};
pub use probe::{maximality_probe, strict_br, ProbeReport, StrictBrReport};
pub use regularized::{regularized_min, RegularizedBranch, RegularizedSolution};
