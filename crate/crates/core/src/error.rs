use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("quadrature did not converge after {panels} panels (error estimate {error_estimate:e})")]
    NonConvergence { panels: usize, error_estimate: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("kernel series did not reach tolerance within {0} terms")]
    Truncation(usize),

    #[error("1 - <M e, e> = {0:e} is negative beyond round-off")]
    NumericalNegativity(f64),

    #[error("2x2 Gramian is singular (determinant ratio {0:e})")]
    DegenerateGramian(f64),

    #[error("extremal function undefined: gamma = 0")]
    DegenerateExtremal,

    #[error("constraints leave no nonzero polynomial of degree <= {0}")]
    InfeasibleConstraints(usize),

    #[error("malformed angle sequence: {0}")]
    MalformedSequence(&'static str),

    #[error("no monotonicity violation found")]
    NotFound,
}

pub type Result<T> = core::result::Result<T, Error>;
