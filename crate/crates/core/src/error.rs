use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading graphs and datasets.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop on vertex {v}")]
    SelfLoop { line: usize, v: usize },
    #[error("line {line}: vertex {v} out of range for n = {n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error(
        "graph indicator is not contiguous at node {node}: graph {graph} follows graph {prev}"
    )]
    NonContiguousIndicator {
        node: usize,
        graph: usize,
        prev: usize,
    },
    #[error("edge ({u}, {v}) crosses graph boundary ({gu} vs {gv})")]
    EdgeCrossesGraphs {
        u: usize,
        v: usize,
        gu: usize,
        gv: usize,
    },
    #[error("{file}: expected {expected} lines, found {found}")]
    LineCount {
        file: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid dataset JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget of {budget} nodes exceeded")]
    WorkLimit { budget: u64 },
    #[error("graph with {n} vertices exceeds the size cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("class {class}: {source}")]
    Class {
        class: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(ParseError::Json(e))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
