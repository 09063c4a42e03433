use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("horizon must be at least one step")]
    EmptyHorizon,
    #[error("block dimension at step {step} must be at least one")]
    ZeroBlockDim { step: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not causal (largest anticausal entry {0:e})")]
    NotCausal(f64),
    #[error("diagonal block {block} is singular (smallest singular value {sigma_min:e})")]
    SingularBlock { block: usize, sigma_min: f64 },
    #[error("spectral factorization has a root on the unit circle (|z| = {0})")]
    RootOnUnitCircle(f64),
    #[error("singular value {0} is not inside (0, 1)")]
    DegenerateSingularValue(f64),
    #[error("Hankel operator of the left factors has norm {0} >= 1")]
    UpsilonNotContractive(f64),
    #[error("subspace basis has rank {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },
    #[error("verification failed: {what} residual {residual:e} exceeds {tol:e}")]
    Verification { what: String, residual: f64, tol: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
