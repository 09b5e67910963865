use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix has non-integral entries")]
    NotIntegral,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("lattice is degenerate")]
    Degenerate,
    #[error("sublattice vectors are linearly dependent")]
    DegenerateSubspace,
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("invalid root lattice index: {0}")]
    BadIndex(String),
    #[error("explicit Gram list has {0} entries, which is not a triangular number")]
    BadTriangleCount(usize),
    #[error("lattice is not positive definite")]
    NotPositiveDefinite,
    #[error("lattice is not negative definite")]
    NotNegativeDefinite,
    #[error("glue group of order {order} exceeds the cap {cap}")]
    GroupTooLarge { order: String, cap: usize },
    #[error("ranks differ ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error("search exceeded its cap: {0}")]
    TooLarge(String),
    #[error("lattice is not presented as U + M with M negative definite even")]
    NotSplitForm,
    #[error("certificate could not be established: {0}")]
    CertificationFailed(String),
    #[error("modulus {0} is not a multiple of the exponent of L/S")]
    ModulusTooSmall(String),
    #[error("rank {0} is below the minimum {1} for this test")]
    RankTooSmall(usize, usize),
    #[error("table missing: {0}")]
    TableMissing(String),
    #[error("no persisted results for prior rank {0}")]
    MissingPriorRank(usize),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("integer overflow in machine-word fast path")]
    Overflow,
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
