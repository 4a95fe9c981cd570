use serde::Serialize;
use thiserror::Error;

/// Errors raised by constructors and element-level operations.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", content = "detail", rename_all = "snake_case")]
pub enum Error {
    #[error("algebra needs at least one block")]
    EmptyDims,
    #[error("block {index} has non-positive dimension")]
    NonPositiveDim { index: usize },
    #[error("operands belong to different algebras ({left:?} vs {right:?})")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("block index {block} out of range for an algebra with {blocks} blocks")]
    BlockOutOfRange { block: usize, blocks: usize },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("block {block} has shape {rows}x{cols}, expected {dim}x{dim}")]
    ShapeMismatch {
        block: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("non-finite matrix entry in block {block}")]
    NonFinite { block: usize },
    #[error("vector has (numerically) zero norm")]
    ZeroVector,
    #[error("fiber {block} isometry residual {residual:e} exceeds tolerance")]
    NonIsometry { block: usize, residual: f64 },
    #[error("malformed ray map: {0}")]
    MalformedMap(String),
    #[error("alpha = {0} is outside 0 < |alpha| < 0.5")]
    AlphaOutOfRange(f64),
    #[error("ray map evaluation failed: {0}")]
    Evaluation(String),
    #[error("unknown built-in map `{0}`")]
    UnknownMap(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
