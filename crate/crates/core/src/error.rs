use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("edge weight must be positive and finite, got {0}")]
    InvalidWeight(f64),
    #[error("self-loop on node {0} is not allowed for this graph")]
    SelfLoop(usize),
    #[error("node position ({x}, {y}) is not finite")]
    NonFinitePosition { x: f64, y: f64 },
    #[error("node position ({x}, {y}) lies outside bounds {width}x{height}")]
    PositionOutOfBounds {
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },
    #[error("operation requires an undirected graph")]
    DirectedGraph,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("image is empty")]
    EmptyImage,
    #[error("image of {width}x{height} is smaller than the 3x3 kernel")]
    ImageTooSmall { width: usize, height: usize },
    #[error("image buffer holds {actual} samples, expected {expected}")]
    SampleCount { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pixel ({x}, {y}) lies outside the {width}x{height} image")]
    PixelOutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("no edge pixels")]
    NoEdgePixels,
    #[error("node {0} has no outgoing transition mass")]
    NoOutgoingMass(usize),
    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),
    #[error("power iteration did not converge within {0} iterations")]
    NotConverged(usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("topology is disconnected")]
    Disconnected,
    #[error("topology has no processors")]
    NoProcessors,
    #[error("makespan is zero")]
    ZeroMakespan,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
