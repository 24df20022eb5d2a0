use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e}, tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("non-finite input matrix")]
    NonFiniteInput,
    #[error("spectral function produced a non-finite value; use a shifted exponent")]
    NonFiniteResult,
    #[error("temperature must be strictly positive for this operation")]
    ZeroTemperature,
    #[error("invalid temperature {0}")]
    InvalidTemperature(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("parameters do not satisfy preset {0}")]
    PresetMismatch(String),
    #[error("formula {formula} is not valid here: {reason}")]
    BranchInvalid { formula: String, reason: String },
    #[error("closed-form evolution requires B = b = 0")]
    FieldsNonzero,
    #[error("no closed form for {0}")]
    NoClosedForm(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("bracket [{lo}, {hi}] does not straddle the onset")]
    BracketInvalid { lo: f64, hi: f64 },
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
