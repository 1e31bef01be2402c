use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("operator symbol does not have constant rank: observed ranks {observed:?}")]
    NonConstantRank { observed: Vec<usize> },
    #[error("operator symbol is identically zero")]
    ZeroOperator,
    #[error("field is not A-free: relative residual {residual:e} exceeds tolerance {tol:e}")]
    NotAFree { residual: f64, tol: f64 },
    #[error("field does not have zero mean: relative mean {mean:e} exceeds tolerance {tol:e}")]
    NonzeroMean { mean: f64, tol: f64 },
    #[error("symbol loses rank at lattice frequency {frequency:?}")]
    RankDrop { frequency: Vec<i64> },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field leaves the constraint set: {0}")]
    NotInConvexSet(String),
    #[error("field is not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
