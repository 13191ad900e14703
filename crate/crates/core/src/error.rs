use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("hypergraph has no edges")]
    EmptyGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameters outside the feasible domain: {0}")]
    Domain(String),

    #[error("rank {value} of node {node} is outside [0, 1]")]
    RankOutOfRange { node: usize, value: f64 },

    #[error(
        "block (k={k}, position={position}, layer={layer}) holds {observed} edges but has capacity {capacity}"
    )]
    CapacityExceeded {
        k: usize,
        position: usize,
        layer: usize,
        observed: u64,
        capacity: String,
    },

    #[error("non-finite log-likelihood term at position {position}, layer {layer}")]
    NonFinite { position: usize, layer: usize },

    #[error("edge order {0} is outside the configured order range")]
    OrderOutOfRange(usize),

    #[error("hypergraph is not dominable: {} isolated node(s)", .isolated.len())]
    NotDominable { isolated: Vec<usize> },

    #[error("feature file has no row for node '{0}'")]
    MissingFeatures(String),

    #[error("block capacity too large for sampling (expected {expected:.3e} edges)")]
    SamplingOverflow { expected: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
