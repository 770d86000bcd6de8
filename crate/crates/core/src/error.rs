use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("matrix trace {0:e} is too small to normalize")]
    ZeroTrace(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("postselection success probability {0:e} is zero")]
    ZeroSuccess(f64),
    #[error("pump power must be nonnegative, got {0}")]
    NegativePower(f64),
    #[error("at least 3 calibration points are required, got {0}")]
    InsufficientData(usize),
    #[error("efficiency fit diverged: {0}")]
    FitDiverged(String),
    #[error("target efficiency {target} exceeds the model maximum {eta_max}")]
    UnreachableTarget { target: f64, eta_max: f64 },
    #[error("measurement set is not informationally complete (rank {0} < 16)")]
    NotInformationallyComplete(usize),
    #[error("no count records supplied")]
    EmptyRecords,
    #[error("all coincidence counts are zero")]
    AllZeroCounts,
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
