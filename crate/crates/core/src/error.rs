//! Library-wide error type.

use thiserror::Error;

/// Failure modes surfaced by the library.
///
/// `Domain` and `UndefinedMean` are precondition violations: the inputs were
/// rejected before any computation started. `Numerical` means a computation
/// ran and could not produce a trustworthy finite result. Callers that map
/// errors to process exit codes should treat the first two as configuration
/// errors and the last as a numerical failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a documented precondition. The message names the
    /// offending field or parameter.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested distribution moment does not exist for the given
    /// parameters.
    #[error("undefined mean: {0}")]
    UndefinedMean(String),

    /// A numerical procedure diverged, failed to converge within its budget,
    /// or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
