//! Shared error type.
//!
//! The variants separate mathematical verdicts from software failures: a
//! classifier returning `diverges` is a success, while `Precondition` marks a
//! theorem-guard rejection and `Numeric`/`NonConvergence` mark genuine
//! numerical breakdowns.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A spec violates one of its construction invariants.
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    /// Quadrature or iteration failed to reach the requested tolerance.
    /// Carries the best partial value obtained.
    #[error("numeric failure in {context}: {message} (partial value {partial:e})")]
    Numeric {
        context: String,
        message: String,
        partial: f64,
    },

    /// A structural assumption (e.g. monotonicity of a scanned map) fails;
    /// the message names the offending input or interval.
    #[error("structural error: {0}")]
    Structural(String),

    /// Bad run configuration (missing table file, malformed schema, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A theorem hypothesis required by the requested construction does not
    /// hold for the given specs. `hypothesis` is machine-readable.
    #[error("precondition rejected [{hypothesis}]: {details}")]
    Precondition { hypothesis: String, details: String },

    /// An internal consistency check failed; this flags a solver bug, not a
    /// mathematical outcome.
    #[error("solver defect: {0}")]
    SolverDefect(String),

    /// Iteration stalled; carries the residual history for diagnosis.
    #[error("non-convergence: {message}")]
    NonConvergence {
        message: String,
        residual_history: Vec<f64>,
    },

    /// A boundary-value bracket could not be established.
    #[error("infeasible problem: {0}")]
    Infeasible(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(context: impl Into<String>, message: impl Into<String>, partial: f64) -> Self {
        Error::Numeric {
            context: context.into(),
            message: message.into(),
            partial,
        }
    }

    /// True when the error is a theorem-guard rejection rather than a failure.
    pub fn is_precondition(&self) -> bool {
        matches!(self, Error::Precondition { .. })
    }
}
