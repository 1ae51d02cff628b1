use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("discretization error: {0}")]
    Discretization(String),

    #[error("assembly produced a non-finite entry at ({row}, {col}); check the parametrization")]
    NonFinite { row: usize, col: usize },

    #[error(
        "single-layer matrix is numerically singular ({count} singular values below {tol:e}); \
         use solve_biomod (method `biomod`) at this wavenumber"
    )]
    SingularSingleLayer { count: usize, tol: f64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("eigenvalue index {index} is unavailable: {reason}")]
    Eigenpair { index: usize, reason: String },

    #[error("σ_{k} is a −∞ sentinel at the scaled wavenumber {mu} (exceptional for this shape)")]
    Sentinel { k: usize, mu: f64 },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
