use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical failure in {what} (residual {residual:e})")]
    NumericalFailure { what: &'static str, residual: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("metric is not strongly convex (smallest eigenvalue {min_eigenvalue:e})")]
    NotStronglyConvex { min_eigenvalue: f64 },

    #[error("expected subset size {requested} is infeasible; must lie in (0, {upper})")]
    InfeasibleSize { requested: f64, upper: f64 },

    #[error("enumeration over dimension {dim} exceeds the limit {limit}")]
    EnumerationTooLarge { dim: usize, limit: usize },

    #[error("run diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("unsupported variant: {0}")]
    UnsupportedVariant(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ContractViolation(msg()))
    }
}
