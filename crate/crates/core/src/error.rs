use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not invertible over the integers")]
    NotUnimodular,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("operation requires nilpotency class <= 2 (group has class {0})")]
    ClassTooLarge(usize),

    #[error("subgroup is not a coordinate lattice")]
    NotALattice,

    #[error("subgroup has infinite index")]
    InfiniteIndex,

    #[error("subgroups live in different ambient groups")]
    AmbientMismatch,

    #[error("malformed chain: {0}")]
    MalformedChain(String),

    #[error("chain fails the RFRS conditions at step {0}")]
    ChainFailsConditions(usize),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("value does not fit the report format: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
