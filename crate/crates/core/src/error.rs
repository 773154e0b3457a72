use thiserror::Error;

/// Errors raised by the constructions, exact computations and tests in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("invalid argument: {0}")]
    Domain(String),
    /// A size guard was exceeded (enumeration caps, O(n^2) table limits).
    #[error("size guard exceeded: {0}")]
    Size(String),
    /// The requested number of digits cannot be delivered.
    #[error("precision request infeasible: {0}")]
    Precision(String),
    /// Adaptive quadrature failed to meet its tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    /// A chi-square cell has expected count below the minimum; merge cells first.
    #[error("sparse cells: {0}")]
    SparseCells(String),
    /// A rate family violates the Lambda-coalescent consistency conditions.
    #[error("inconsistent rates: {0}")]
    InconsistentRates(String),
    /// A rate family has no value at the requested index.
    #[error("rate a({n},{k}) is undefined")]
    UndefinedRate { n: usize, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
