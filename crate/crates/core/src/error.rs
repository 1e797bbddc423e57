use thiserror::Error;

/// Errors raised by the probing, QFI and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NonHermitian(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("derivative leaves the support of rho at ({row}, {col}): |drho| = {magnitude:e}")]
    InconsistentDerivative { row: usize, col: usize, magnitude: f64 },

    #[error("theta = {0} is outside the admissible range")]
    ThetaOutOfRange(f64),

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("Schmidt vector is not normalized (sum of squares {0})")]
    NotNormalized(f64),

    #[error("Schmidt coefficients must be non-negative and finite")]
    NegativeCoefficient,

    #[error("Schmidt coefficient {0} is zero")]
    ZeroCoefficient(usize),

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    #[error("zero eigenvalue at index {0} with non-zero derivative")]
    ZeroEigenvalue(usize),

    #[error("quantum Fisher information diverges at h = 1")]
    Divergent,

    #[error("degenerate denominator")]
    DegenerateDenominator,

    #[error("no root found in [{lo}, {hi}]")]
    NoRootFound { lo: f64, hi: f64 },

    #[error("linear system is singular")]
    SingularSystem,

    #[error("outcome {0} has vanishing probability but non-vanishing derivative")]
    DegenerateOutcome(usize),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
