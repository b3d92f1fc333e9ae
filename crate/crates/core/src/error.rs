use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is not symmetric at ({row}, {col}): |a_ij - a_ji| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("negative adjacency weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("node {node} out of range for a graph with {n_nodes} nodes")]
    NodeOutOfRange { node: usize, n_nodes: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("requested {requested} anomalies but only {available} candidate pairs exist")]
    InsufficientCandidates { requested: usize, available: usize },

    #[error("graph stayed disconnected after {attempts} sampling attempts; increase p_in or p_out")]
    Disconnected { attempts: usize },

    #[error("{solver} diverged at iteration {iteration}")]
    Diverged { solver: &'static str, iteration: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("metric is undefined: {0}")]
    UndefinedMetric(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(context: &'static str, expected: (usize, usize), found: (usize, usize)) -> Self {
        use alloc::format;
        Error::Dimension {
            context,
            expected: format!("{}x{}", expected.0, expected.1),
            found: format!("{}x{}", found.0, found.1),
        }
    }
}
