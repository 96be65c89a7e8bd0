//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} splits or ramifies in Z[j]; the quotient ring is not a field (need p = 3 mod 4)")]
    NotGaussianPrime(u32),
    #[error("division by zero in GF(q)")]
    DivisionByZero,
    #[error("matrix is singular over GF(q)")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis is rank deficient (relative smallest singular value below tolerance)")]
    RankDeficient,
    #[error("matrix is not square")]
    NonSquare,
    #[error("channel matrix is singular or too ill-conditioned")]
    SingularChannel,
    #[error("alignment chain produced a rank-deficient precoder")]
    AlignmentDegenerate,
    #[error("precoder has zero power trace")]
    ZeroTrace,
    #[error("antenna count {0} is invalid (need M >= 2)")]
    InvalidAntennaCount(usize),
    #[error("vector is not a point of the fine lattice")]
    NotInFineLattice,
    #[error("coset is not in the row space of the code generator")]
    NotInRowSpace,
    #[error("value {0} is not a Gaussian-integer grid point")]
    NotOnGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trial {trial} failed after {retries} retries: {source}")]
    TrialFailed {
        trial: u64,
        retries: u32,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
