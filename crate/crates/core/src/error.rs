use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid spacing: {0}")]
    InvalidSpacing(String),

    #[error("rasterized grid has no interior node")]
    EmptyGrid,

    #[error("parameter `{name}` = {value} is finer than 2h = {limit}")]
    FeatureTooFine { name: &'static str, value: f64, limit: f64 },

    #[error("point has dimension {got}, domain has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("malformed PGM image: {0}")]
    Pgm(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "eigensolver did not converge: {converged} of {requested} pairs after {applications} solves (worst residual {worst_residual:.3e})"
    )]
    NoConvergence {
        converged: usize,
        requested: usize,
        applications: usize,
        worst_residual: f64,
    },

    #[error("eigensolver budget of {budget} solves exhausted with {converged} of {requested} pairs")]
    BudgetExceeded {
        budget: usize,
        converged: usize,
        requested: usize,
    },

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("need at least {needed} eigenpairs, have {available}")]
    InsufficientModes { needed: usize, available: usize },

    #[error("coefficient a[{alpha}][{j}] = {value:.3e} should vanish (j <= alpha)")]
    TriangularViolation { alpha: usize, j: usize, value: f64 },

    #[error("exponent t = {0} must exceed 1/2")]
    InvalidExponent(f64),

    #[error("bracket for j = {j} is {value:.3e}, below -1e-4")]
    NegativeBracket { j: usize, value: f64 },

    #[error("bound requires dimension {expected}, spectrum has dimension {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("index {index} outside {min}..={max}")]
    IndexOutOfRange { index: usize, min: usize, max: usize },

    #[error("root finding failed: {0}")]
    ConvergenceFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures of the numerics rather than of the request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::NoConvergence { .. }
                | Error::BudgetExceeded { .. }
                | Error::ZeroVector
                | Error::TriangularViolation { .. }
                | Error::NegativeBracket { .. }
                | Error::ConvergenceFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
