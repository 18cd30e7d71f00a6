use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge {{{u}, {v}}} has weight zero")]
    ZeroWeight { u: usize, v: usize },

    #[error("non-finite value {value} at {context}")]
    NonFinite { value: f64, context: String },

    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },

    #[error("edge index {index} out of range ({count} edges)")]
    EdgeOutOfRange { index: usize, count: usize },

    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("matrix must have at least one row")]
    EmptyMatrix,

    #[error("vertex subset must be non-empty")]
    EmptySubset,

    #[error("invalid vertex partition: {0}")]
    InvalidPartition(String),

    #[error("row {row} sums to {sum}, exceeding the zero-row-sum tolerance {tolerance}")]
    NotZeroRowSum { row: usize, sum: f64, tolerance: f64 },

    #[error("dimension {n} exceeds the exhaustive-search guard N_max = {nmax}")]
    GuardExceeded { n: usize, nmax: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("edge set is not an induced line: {0}")]
    NotALine(String),

    #[error("line contains {count} negative edges; at most one is compatible with semi-definiteness")]
    MultipleNegativeEdges { count: usize },

    #[error("edge {index} is not part of the line")]
    EdgeNotInLine { index: usize },

    #[error("edge {index} does not have negative weight")]
    EdgeNotNegative { index: usize },

    #[error("invalid Kuramoto system: {0}")]
    InvalidSystem(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
