use thiserror::Error;

/// Errors raised by the matrix, function-catalog, map and inequality layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A*| = {asymmetry:e}")]
    NonHermitianInput { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue {eigenvalue} lies outside [{m}, {big_m}]")]
    SpectrumOutOfDomain { eigenvalue: f64, m: f64, big_m: f64 },

    #[error("{function} is undefined at {t}")]
    FunctionDomainError { function: String, t: f64 },

    #[error("inverse {function} is undefined at {t}")]
    InverseDomainError { function: String, t: f64 },

    #[error("Hermitian eigensolver did not converge")]
    EigenNoConvergence,

    #[error("invalid spectral bounds: need m < M, got [{m}, {big_m}]")]
    InvalidBounds { m: f64, big_m: f64 },

    #[error("[{m}, {big_m}] is not contained in the natural domain of {function}")]
    DomainMismatch { function: String, m: f64, big_m: f64 },

    #[error("second derivative of {function} is unavailable at {t}")]
    MissingSecondDerivative { function: String, t: f64 },

    #[error("{function} is not positive at {t}")]
    NonpositiveFunction { function: String, t: f64 },

    #[error("points must be distinct: {0} appears twice")]
    DuplicatePoints(f64),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected {expected} operators, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("{t} lies outside [{m}, {big_m}]")]
    OutOfInterval { t: f64, m: f64, big_m: f64 },

    #[error("bad weights: {0}")]
    BadWeights(String),

    #[error("map family is not unital: defect {defect:e}")]
    NotUnital { defect: f64 },

    #[error("normalizer sum of maps is singular (min eigenvalue {min_eigenvalue:e})")]
    SingularNormalizer { min_eigenvalue: f64 },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("budget of {budget} exhausted without a witness (best gap {best_gap:e})")]
    BudgetExhausted { budget: usize, best_gap: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
