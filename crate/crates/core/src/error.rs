//! Error type shared by the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("vertex index {0} out of range")]
    VertexOutOfRange(usize),

    #[error("vertex `{0}` is not an interior vertex")]
    NotInterior(String),

    #[error("vertex `{0}` is not a boundary vertex")]
    NotBoundary(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("empty vertex subset")]
    EmptySubset,

    #[error("boundary is empty")]
    EmptyBoundary,

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("singular linear system")]
    SingularSystem,

    #[error("coercivity margin {margin} must exceed 1 for the drift operator")]
    Coercivity { margin: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("monotone iteration exceeded {iterations} iterations (last increment {increment:e})")]
    MaxIterations { iterations: usize, increment: f64 },

    #[error("bracket inverted at vertex `{vertex}` (lower {lower} > upper {upper})")]
    BracketInverted { vertex: String, lower: f64, upper: f64 },

    #[error("time grids do not match")]
    GridMismatch,

    #[error("time grid too coarse: need at least {needed} samples, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("solution diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
