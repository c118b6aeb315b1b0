use thiserror::Error;

use crate::model::{EdgeId, VertexId};

/// Failures while reading instance, pricing or weighted-grid files.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid money value {0:?}")]
    Money(String),
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {0} is outside the grid")]
    VertexOutOfBounds(VertexId),
    #[error("edge {0} is outside the grid")]
    EdgeOutOfBounds(EdgeId),
    #[error("grid dimensions must be at least 1x1 (got width {width}, length {length})")]
    BadDimensions { width: usize, length: usize },
    #[error("empty or invalid row range [{lo}, {hi}] for a grid of length {length}")]
    EmptyRowRange { lo: usize, hi: usize, length: usize },
    #[error("pricing covers {got} edges but the grid has {expected}")]
    PricingShape { expected: usize, got: usize },
    #[error("missing edge {0} must be priced at infinity")]
    MissingEdgePriced(EdgeId),
    #[error("distance matrices do not share the separator row")]
    SeparatorNotShared,
    #[error("requested vertex {0} is not indexed by either matrix")]
    UnknownVertex(VertexId),
    #[error("root {0} is not on the top row")]
    RootNotOnTopRow(VertexId),
    #[error("driver {u} -> {v} does not touch or straddle middle row {middle}")]
    NotStraddling { u: VertexId, v: VertexId, middle: usize },
    #[error("price set is degenerate (maximum budget is zero) but a positive budget is present")]
    DegeneratePriceSet,
    #[error("budget exceeds the price set maximum")]
    BudgetAboveMax,
    #[error("exhaustive search over {edges} edges refused (guard is {guard})")]
    GuardExceeded { edges: usize, guard: usize },
    #[error("dynamic program grew past {budget} states")]
    StateBudgetExceeded { budget: usize },
    #[error("level {level} does not exist (the decomposition has {levels})")]
    NoSuchLevel { level: usize, levels: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Refusals caused by configured resource limits rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. } | Error::StateBudgetExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
