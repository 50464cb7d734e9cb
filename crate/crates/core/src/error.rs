use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The iterate of the Taylor recurrence left the representable range.
    #[error("overflow in stage {stage} of {stages}: result too large to represent")]
    Overflow { stage: usize, stages: usize },

    #[error("series terms do not decay at theta = {theta:e} (degree {m})")]
    RadiusExceeded { m: usize, theta: f64 },

    #[error("theta table generation failed for m = {m}, tol = {tol:e}: {reason}")]
    ThetaGeneration { m: usize, tol: f64, reason: String },

    #[error("reference oracle unavailable: {0}")]
    OracleUnavailable(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
