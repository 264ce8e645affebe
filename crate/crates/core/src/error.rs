use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("site {site} out of range for {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("invalid correlation label: {0}")]
    InvalidLabel(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),

    #[error("ground-state policy failed at parameter {parameter}: {reason}")]
    Policy { parameter: f64, reason: String },

    #[error("quadrature did not converge: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("rank-deficient sample set: rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },

    #[error("series too short: {len} points, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },

    #[error("symmetry violated: {0}")]
    Symmetry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
