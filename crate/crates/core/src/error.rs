use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("graph is not a tree: {0}")]
    NotATree(String),
    #[error("operation requires an undirected cascade model")]
    DirectedModel,
    /// Every fixed-target LP was infeasible. Only possible under a binding budget.
    #[error("no fixed-target LP is feasible")]
    AllInfeasible,
    /// The LP backend failed for numerical reasons; distinct from infeasibility.
    #[error("solver failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidParameter(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
