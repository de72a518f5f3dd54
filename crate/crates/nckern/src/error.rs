//! Error types shared across the crate.

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("Choi matrix violates the block support pattern (off-pattern mass {mass:.3e})")]
    PatternViolation { mass: f64 },

    #[error("map is not completely positive (eigmin {eigmin:.3e})")]
    NotCp { eigmin: f64 },

    #[error("map violates the bimodule constraints (residual {residual:.3e})")]
    NotBimodule { residual: f64 },

    #[error("input violates the bimodule constraints (residual {residual:.3e})")]
    ConstraintViolation { residual: f64 },

    #[error("Stinespring data does not reconstruct the kernel (residual {residual:.3e})")]
    ReconstructionFailure { residual: f64 },

    #[error("affine constraint system is inconsistent (least-squares residual {residual:.3e})")]
    InconsistentAffine { residual: f64 },

    #[error("no feasibility certificate found: {0}")]
    NoCertificate(String),

    #[error("dominance hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("invalid operator system: {0}")]
    InvalidOperatorSystem(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
