use thiserror::Error;

use crate::vertex::VertexId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("arity mismatch for sort `{sort}`: expected {expected}, got {got}")]
    ArityMismatch { sort: String, expected: usize, got: usize },
    #[error("invalid vertex {0}: outside the sort domain")]
    InvalidVertex(VertexId),
    #[error("enumeration bound {bound} exceeded at {vertex}: degree {degree} but only {found} neighbors inside the index box")]
    BoundExceeded {
        vertex: VertexId,
        bound: i64,
        degree: u64,
        found: usize,
    },
    #[error("enumeration box too large ({0} points)")]
    BoxTooLarge(u128),
    #[error("window was not extracted from oracle `{expected}` (found `{found}`)")]
    WindowMismatch { expected: String, found: String },
    #[error("certificate host mismatch: {0}")]
    HostMismatch(String),
    #[error("removed sets overlap at {0}")]
    Overlap(VertexId),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("certificate failed verification: {0}")]
    VerificationFailed(String),
    #[error("size guard exceeded: window has {size} vertices, limit is {limit}")]
    SizeGuard { size: usize, limit: usize },
    #[error("oracle is not a disjoint union")]
    NotDisjointUnion,
    #[error("census validity bounds were not declared")]
    MissingBounds,
    #[error("{0}")]
    Parse(String),
    #[error("unknown zoo entry `{0}`")]
    UnknownEntry(String),
    #[error("no path found within index bound {0}")]
    PathNotFound(i64),
    #[error("cover oracle failed at {0}")]
    CoverFailed(VertexId),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
