use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin quantum number {0}: 2S must be a positive integer")]
    InvalidSpin(f64),

    #[error("invalid sphere direction (theta={theta}, phi={phi})")]
    InvalidDirection { theta: f64, phi: f64 },

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),

    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state left the physical set at t={time}: {reason}")]
    Evolution { time: f64, reason: String },

    #[error("steady state is not unique: {count} eigenvalues of the Liouvillian lie within {tol:e} of zero")]
    DegenerateSteadyState { count: usize, tol: f64 },

    #[error("no Liouvillian eigenvalue within {tol:e} of zero (smallest modulus {smallest:e})")]
    NoNullVector { smallest: f64, tol: f64 },

    #[error("steady-state residual {0:e} exceeds tolerance")]
    SteadyStateResidual(f64),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
