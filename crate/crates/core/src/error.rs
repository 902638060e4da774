use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin system must contain at least one spin")]
    NoSpins,
    #[error("{n_spins} spins exceeds the cap of {cap}")]
    TooManySpins { n_spins: usize, cap: usize },
    #[error("site {site} out of range 1..={n_spins}")]
    SiteOutOfRange { site: usize, n_spins: usize },
    #[error("sites must be distinct (both are {0})")]
    IdenticalSites(usize),
    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver failed: {0}")]
    EigenSolverFailed(&'static str),
    #[error("spins {0} and {1} coincide")]
    CoincidentSpins(usize, usize),
    #[error("field axis must be a nonzero finite vector")]
    InvalidFieldAxis,
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid two-spin state: {0}")]
    InvalidTwoSpinState(String),
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
