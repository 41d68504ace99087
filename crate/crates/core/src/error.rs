use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (e.g. `mu < 1`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition does not hold (e.g. `k < 2`).
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular form: {0}")]
    Singular(String),
    /// The requested limit does not exist as a finite number.
    #[error("divergent limit: {0}")]
    Divergent(String),
    /// Adaptive quadrature did not reach the requested tolerance.
    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error_estimate:e} after {evaluations} evaluations ({reason})"
    )]
    Quadrature { value: f64, error_estimate: f64, evaluations: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Short machine-readable tag, used by the CLI and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::Dimension(_) => "dimension",
            Error::Singular(_) => "singular",
            Error::Divergent(_) => "divergent",
            Error::Quadrature { .. } => "quadrature",
        }
    }
}
