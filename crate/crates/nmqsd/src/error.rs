//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or parameter combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical scheme failed to converge or lost validity.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Iterative corrector failed to converge at a specific time.
    #[error("corrector failed to converge at t = {t}: {detail}")]
    Convergence { t: f64, detail: String },

    /// Fock-space truncation too small for the requested state or run.
    #[error("truncation error: leakage {leakage:.3e} at N = {levels}; increase levels_per_mode to at least {required}")]
    Truncation {
        levels: usize,
        leakage: f64,
        required: usize,
    },

    /// Noise covariance matrix is not positive semidefinite.
    #[error("kernel validity error: {0}")]
    KernelValidity(String),

    /// A whole run aborted (trace drift, leakage, failed trajectories...).
    #[error("run failure: {0}")]
    RunFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
