use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("indeterminate sum: +inf + -inf")]
    IndeterminateSum,

    #[error("not a number where an extended real was expected")]
    NotANumber,

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("graph is not monotone: pair ({first}, {second}) has product {product:e}")]
    NotMonotone {
        first: usize,
        second: usize,
        product: f64,
    },

    #[error("function is not proper: {0}")]
    Improper(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point is not in the {eps}-enlargement: infimum {inf}")]
    NotInEnlargement { eps: f64, inf: f64 },

    #[error("point is not monotonically related to the graph: infimum {inf}")]
    NotMonotonicallyRelated {
        inf: f64,
        witness: Option<crate::operators::PrimalDualPoint>,
    },

    #[error("constraint qualification failed: {0}")]
    QualificationFailed(String),

    #[error("solver failure: {message} (best value {best_value})")]
    SolverFailure { message: String, best_value: f64 },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The inputs are malformed or inconsistent.
    Input,
    /// The inputs are well formed but a mathematical precondition fails.
    Precondition,
    /// A numerical routine did not reach its target.
    Solver,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_)
            | Error::NotANumber
            | Error::Unsupported(_) => ErrorClass::Input,
            Error::SolverFailure { .. } => ErrorClass::Solver,
            _ => ErrorClass::Precondition,
        }
    }

    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}
