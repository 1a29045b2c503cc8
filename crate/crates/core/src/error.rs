use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Node indices carried by variants are 0-based; messages print the 1-based
/// ids used in documents and on the command line.
#[derive(Debug, Error)]
pub enum Error {
    /// A document or programmatic instance failed validation. `path` points at
    /// the offending field, e.g. `nodes[3].cost`.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },

    #[error("node {} is out of range for an instance with {n} nodes", .node + 1)]
    NodeOutOfRange { node: usize, n: usize },

    #[error("root node {} is not selected", .root + 1)]
    RootNotSelected { root: usize },

    #[error("selection has length {got}, expected {expected}")]
    SelectionLength { got: usize, expected: usize },

    #[error("selection does not induce a connected subgraph")]
    DisconnectedSelection,

    #[error("starting selection is infeasible")]
    InfeasibleStart,

    #[error("instance is infeasible: no selection meets demand while staying connected")]
    InfeasibleInstance,

    #[error("method3 requires positive demand at every node; node {} has zero demand", .node + 1)]
    ZeroDemand { node: usize },

    #[error("exhaustive search is capped at {cap} nodes, instance has {n}")]
    TooLarge { n: usize, cap: usize },

    #[error("distance matrix is {got}x{got}, expected {expected}x{expected}")]
    MatrixDimension { got: usize, expected: usize },

    #[error("vertex cover reduction needs at least one edge")]
    EmptyEdgeSet,

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}
