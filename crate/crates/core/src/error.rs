use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not unimodular: |z| = {modulus} (coordinate {index})")]
    NotUnimodular { index: usize, modulus: f64 },

    #[error("table has {got} entries, expected K^n = {expected}")]
    TableSize { expected: usize, got: usize },

    #[error("enumeration of {size} points exceeds the cap of {cap}")]
    EnumerationCap { size: u128, cap: u128 },

    #[error("dense dimension {dim} exceeds the cap of {cap}")]
    DenseCap { dim: usize, cap: usize },

    #[error("infeasible degree {d} for n = {n}, K = {k}")]
    InfeasibleDegree { n: usize, k: usize, d: usize },

    #[error("K must be prime for HW (got K = {0})")]
    CompositeModulus(usize),

    #[error("index (0, 0) has no nontrivial eigensystem")]
    TrivialIndex,

    #[error("degree {0} is too large (refusing above {1})")]
    DegreeTooLarge(usize, usize),

    #[error("sample budget overflow: {0:e} exceeds 2^62")]
    BudgetOverflow(f64),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("label length mismatch: {0}")]
    Label(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
