//! Scenario-driven front end for `monorep`.
//!
//! A scenario file declares functions, operators and bifunctions and names
//! one command to run on them; [`run`] returns a JSON report.

pub mod build;
pub mod run;
pub mod scenario;
pub mod value;

pub use run::{run, RunOptions, RunReport};
pub use scenario::{parse_scenario, Category, Command, Declaration, Params, ParseError, Scenario, Verb};
pub use value::Value;

use monorep::ErrorClass;

/// Process exit status for a failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    /// Parse, validation or IO errors.
    Parse = 2,
    /// Rejected inputs and violated preconditions.
    Precondition = 3,
    Solver = 4,
}

pub fn exit_code(e: &monorep::Error) -> ExitCode {
    match e.class() {
        ErrorClass::Input | ErrorClass::Precondition => ExitCode::Precondition,
        ErrorClass::Solver => ExitCode::Solver,
    }
}
