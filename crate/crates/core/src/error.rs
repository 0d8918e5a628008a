use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has non-integer entries")]
    NotIntegral,
    #[error("irrational real eigenvalue: characteristic factor {factor} has a real root that is not rational")]
    IrrationalSpectrum { factor: String },
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("reduction left {blocks} Jordan blocks for eigenvalue {lambda}; expected one")]
    MultipleBlocks { lambda: String, blocks: usize },
    #[error("json: {0}")]
    Json(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
