use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        got: String,
    },

    #[error("matrix is not Hurwitz: largest eigenvalue real part {max_real:e}")]
    NotStable { max_real: f64 },

    #[error("Newton-Kleinman iterate {iteration} is not stabilizing (closed-loop max real part {max_real:e})")]
    NotStabilizable { iteration: usize, max_real: f64 },

    #[error("filter Riccati iterate {iteration} is not stabilizing (closed-loop max real part {max_real:e})")]
    NotDetectable { iteration: usize, max_real: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue:e} below -{threshold:e}")]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix is not symmetric: relative asymmetry {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("Cholesky factorization failed at time step {step}")]
    NotPositiveDefinite { step: usize },

    #[error("implicit-step Jacobian is numerically singular (condition estimate {condition:e})")]
    SingularJacobian { condition: f64 },

    #[error("matrix is singular: {context}")]
    Singular { context: &'static str },

    #[error("decomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("step {k} failed: {source}")]
    StepFailed {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn dims(context: &'static str, expected: impl ToString, got: impl ToString) -> Error {
    Error::DimensionMismatch {
        context,
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
