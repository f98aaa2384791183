use thiserror::Error;

/// Errors raised by the matrix kernels, the network model, and the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is indefinite (min eigenvalue {min_eig:e}, tolerance {tol:e})")]
    Indefinite { min_eig: f64, tol: f64 },

    /// The pair (A, B) has no common block structure: A has mass on the
    /// null space of B, so the logdet difference is infinite.
    #[error("ill-posed logdet pair: signal leaks {leak:e} into the null space of the noise")]
    IllPosedPair { leak: f64 },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("inadmissible saddle pair at link {link}: {reason}")]
    InadmissibleSaddle { link: usize, reason: String },

    #[error("bisection failed for group {group}: {reason}")]
    Bisection { group: usize, reason: String },

    #[error("dual price fixed point not reached after {sweeps} sweeps (max deviation {deviation:e})")]
    MuNotConverged { sweeps: usize, deviation: f64 },

    #[error("initial covariances violate group {group} (usage {usage:e})")]
    Infeasible { group: usize, usage: f64 },

    #[error("invalid constraint scaling factor {lambda:e}")]
    InvalidScaling { lambda: f64 },

    #[error("objective decreased at iteration {iter}: {previous:.17e} -> {next:.17e}")]
    MonotonicityViolation { iter: usize, previous: f64, next: f64 },

    #[error("unsupported constraint mode: {0}")]
    UnsupportedMode(String),

    #[error("degenerate duality correspondence: {0}")]
    DegenerateCorrespondence(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
