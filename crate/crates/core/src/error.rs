//! Error type shared by the whole crate.

/// Errors raised by scene synthesis, operators and solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or matrix dimensions do not match the operator.
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A structural parameter (split sizes, model order, ...) is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A constraint set is empty or a sampling constraint cannot be met.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative solver exhausted its budget without meeting its tolerance.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Snapshot (de)serialization failed.
    #[error("snapshot error: {0}")]
    Snapshot(String),
}

pub type Result<T> = std::result::Result<T, Error>;
