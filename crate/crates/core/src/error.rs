use thiserror::Error;

pub type Result<T> = std::result::Result<T, TodaError>;

#[derive(Debug, Error)]
pub enum TodaError {
    #[error("invalid Lie algebra {family}{rank}: {reason}")]
    InvalidAlgebra {
        family: String,
        rank: usize,
        reason: String,
    },

    #[error("grid too small: N = {0}, need at least {min}", min = crate::grid::MIN_NODES)]
    GridTooSmall(usize),

    #[error("point ({0}, {1}) is not strictly inside the unit square")]
    PointOutside(f64, f64),

    #[error("singular source strength must be positive, got {0}")]
    NonPositiveAlpha(f64),

    #[error("component {component} has non-positive mass {mass}")]
    NonPositiveMass { component: usize, mass: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("linear solver breakdown: {0}")]
    LinearSolver(String),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("Newton failed after {iterations} iterations (residual {residual:e}): {reason}")]
    NewtonFailed {
        iterations: usize,
        residual: f64,
        reason: String,
        last: Option<Box<crate::solver::TodaState>>,
    },

    #[error("spectral radius bound violated for {algebra}: rho = {rho}, expected {bound}")]
    BoundViolation {
        algebra: String,
        rho: f64,
        bound: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a discrete subsolution: max margin {0:e}")]
    NotSubsolution(f64),

    #[error("cache format: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
