use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature did not converge on [{a}, {b}]: error estimate {estimate:e} > tolerance {tol:e}")]
    NoConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        tol: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible linewidth: {0}")]
    Infeasible(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid mode index: {0}")]
    ModeIndex(String),

    #[error("matrix is not unitary: max deviation {deviation:e} exceeds {tol:e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("wave function is not normalized: norm {norm}")]
    Unnormalized { norm: f64 },

    #[error("unknown tomography basis `{0}`")]
    UnknownBasis(String),

    #[error("visibility {0} outside [0, 1]")]
    VisibilityOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
