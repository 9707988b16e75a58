use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("state trace is {0}, expected 1")]
    NotNormalized(f64),

    #[error("eta is undefined for negative argument {0}")]
    NegativeArgument(f64),

    #[error("not a permutation: {0}")]
    NotPermutation(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),

    #[error("density operator is not diagonal (off-diagonal {0:e})")]
    NotDiagonal(f64),

    #[error("not bistochastic: {0}")]
    NotBistochastic(String),

    #[error("not a probability vector: {0}")]
    NotProbability(String),

    #[error("invalid matrix file: {0}")]
    Parse(String),

    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
