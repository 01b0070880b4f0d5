use thiserror::Error;

/// Errors raised by the numerical kernel and the physics layers above it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |a - a^dagger| = {violation:e}")]
    NonHermitian { violation: f64 },

    #[error("density matrix trace is {trace} (expected 1)")]
    NonUnitTrace { trace: f64 },

    #[error("density matrix is not positive semidefinite: min eigenvalue {min_eig:e}")]
    NotPsd { min_eig: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("layout {factors:?} does not fit dimension {dim}")]
    LayoutMismatch { factors: Vec<usize>, dim: usize },

    #[error("invalid state at t = {t}: {reason}")]
    StateInvalid { t: f64, reason: String },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("calibration failure: trace distance {distance:e} exceeds {tolerance:e}")]
    CalibrationFailure { distance: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
