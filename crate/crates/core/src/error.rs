use thiserror::Error;

/// Errors reported by graph construction, the solvers and the file readers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GcsgError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coalition structure: {0}")]
    InvalidStructure(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("{what} limited to {cap} nodes, got {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("graph class mismatch: {0}")]
    ClassMismatch(String),

    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("assignment does not satisfy clause {0}")]
    Unsatisfied(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GcsgError>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> GcsgError {
    GcsgError::Parse { line, msg: msg.into() }
}
