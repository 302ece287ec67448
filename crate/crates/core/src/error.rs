use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

/// Input and hypothesis errors. Internal invariant failures panic instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is empty")]
    EmptyGraph,
    #[error("cannot parse word {word:?}: {reason}")]
    WordParse { word: String, reason: String },
    #[error("word is not cyclically reduced: {0}")]
    NotCyclicallyReduced(String),
    #[error("path is not closed at the basepoint")]
    OpenPath,
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("loop is a proper power, not primitive")]
    NotPrimitive,
    #[error("morphism is not an immersion")]
    NotImmersion,
    #[error("graph is not a core graph")]
    NotCore,
    #[error("codomain mismatch between the two maps")]
    CodomainMismatch,
    #[error("rank {0} is too small for a cocycle with these properties")]
    RankTooSmall(i64),
    #[error("loop does not close in the cover (total level {0})")]
    NonzeroLevel(i64),
    #[error("cocycle vanishes on every traversed edge")]
    TrivialCover,
    #[error("stacking is invalid: {0}")]
    InvalidStacking(String),
    #[error("pullback subject is malformed: {0}")]
    MalformedPullback(String),
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
