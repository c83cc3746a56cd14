//! Crate-wide error type.

use crate::lattice::Point;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid adjacency: {0}")]
    InvalidAdjacency(String),

    #[error("duplicate point {0}")]
    DuplicatePoint(Point),

    #[error("point {0} is not in the image")]
    NotInImage(Point),

    #[error("sequence is empty")]
    EmptySequence,

    #[error("entries {index} and {} are neither equal nor adjacent", index + 1)]
    NotAPath { index: usize },

    #[error("sequence is not a loop: first and last entries differ")]
    NotALoop,

    #[error("operands belong to different images")]
    ImageMismatch,

    #[error("paths are not composable: first ends at {end}, second starts at {start}")]
    NotComposable { end: Point, start: Point },

    #[error("grid is malformed: {0}")]
    MalformedGrid(String),

    #[error("grid has no domain order; it does not describe a homotopy of an image")]
    MissingDomainOrder,

    #[error("domain order is not a permutation of the image points")]
    BadDomainOrder,

    #[error("loop basepoint {found} does not match required basepoint {expected}")]
    BasepointMismatch { expected: Point, found: Point },

    #[error("the loop's basepoint is the point to be avoided")]
    BasepointForbidden,

    #[error("generator does not apply to this image: {0}")]
    UnsupportedImage(String),

    #[error("no single-point substitution exists at index {index}")]
    NoSubstitution { index: usize },

    #[error("window rewrite at index {index} found no avoiding path within budget")]
    WindowUnsolvable { index: usize },

    #[error("adjacency graph contains a cycle; not a tree")]
    NotATree,

    #[error("no two-step path joins the adjacent pair {a} and {b}")]
    HypothesisFailed { a: Point, b: Point },

    #[error("image has {size} points, above the cap of {cap} for this search")]
    CapExceeded { size: usize, cap: usize },

    #[error("invalid search budget: {0}")]
    BadBudget(String),

    #[error("state budget exhausted after {states} states before the search could decide")]
    BudgetExceeded { states: u64 },

    #[error("unknown catalog id {0:?}")]
    UnknownCatalogId(String),

    #[error("file format error: {0}")]
    Format(String),

    #[error("content hash mismatch: file declares {declared}, data hashes to {actual}")]
    HashMismatch { declared: String, actual: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
