//! Crate-wide error type.
//!
//! Variants are grouped by failure class rather than by module so that
//! callers (in particular the CLI) can map them onto coarse exit codes:
//! data/ingestion problems, numeric failures, and exceeded enumeration
//! bounds are distinguishable without string matching.

use thiserror::Error;

/// Convenience alias used by every fallible operation in the crate.
pub type Result<T> = std::result::Result<T, CoreError>;

/// All errors produced by the core library.
#[derive(Debug, Error)]
pub enum CoreError {
    /// File-system level ingestion failure.
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed tabular input (ragged rows, bad cells, duplicate names…).
    #[error("invalid data: {0}")]
    Data(String),

    /// A referenced column or vertex does not exist.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// Preconditions on numeric inputs violated (non-positive values for a
    /// log transform, constant columns, invalid parameter ranges…).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A linear system or matrix operation failed (rank deficiency,
    /// singular submatrix, Cholesky failure).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An iterative solver did not converge within its iteration cap.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Graph structure violates an invariant (cycles, duplicate edges,
    /// missing edges, undirected edges where orientation is required).
    #[error("graph error: {0}")]
    Graph(String),

    /// An exhaustive-enumeration bound was exceeded.
    #[error("enumeration bound exceeded: {0}")]
    BoundExceeded(String),

    /// A scenario name or its parameters are invalid.
    #[error("scenario error: {0}")]
    Scenario(String),
}
