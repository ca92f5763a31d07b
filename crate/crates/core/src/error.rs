use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero scalar")]
    DegenerateScalar,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bidegree error: {0}")]
    Bidegree(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("dimension error: {0}")]
    Dims(String),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("inconsistent system at degree {degree}: {detail}")]
    InconsistentSystem { degree: usize, detail: String },
    #[error("truncation error: {0}")]
    Truncation(String),
    #[error("residual error: {0}")]
    Residual(String),
    #[error("embedding condition fails: {0}")]
    Condition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateScalar => "DegenerateScalar",
            Error::Shape(_) => "ShapeError",
            Error::Bidegree(_) => "BidegreeError",
            Error::Index(_) => "IndexError",
            Error::Dims(_) => "DimsError",
            Error::Rank(_) => "RankError",
            Error::InconsistentSystem { .. } => "InconsistentSystem",
            Error::Truncation(_) => "TruncationError",
            Error::Residual(_) => "ResidualError",
            Error::Condition(_) => "ConditionError",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
