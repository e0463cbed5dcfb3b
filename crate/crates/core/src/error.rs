use thiserror::Error;

/// Errors raised by graph construction, spectral routines, and verifiers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex {0} is isolated; the walk matrix is undefined")]
    IsolatedVertex(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph has no edges")]
    NoEdges,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("pair ({0}, {1}) has no common neighbour")]
    NoCommonNeighbor(usize, usize),

    #[error("test function is not mean-zero under the stationary distribution (mean {0:e})")]
    NotMeanZero(f64),

    #[error("test function is identically zero")]
    ZeroFunction,

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("serialization failed: {0}")]
    Serialize(String),
}

pub type Result<T> = std::result::Result<T, Error>;
