use thiserror::Error;

use crate::group::GroupKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols} but {kind} needs {expected}x{expected}")]
    DimensionMismatch {
        kind: GroupKind,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("vector length {got} does not match matrix dimension {expected}")]
    VectorLength { got: usize, expected: usize },
    #[error("{0} carries no invariant bilinear form")]
    NoBilinearForm(GroupKind),
    #[error("operation requires an orthogonal or symplectic kind, got {0}")]
    NotOrthoSymplectic(GroupKind),
    #[error("unrecognized group kind {0:?}; expected e.g. \"U(3)\" or \"Sp(1)\"")]
    InvalidKind(String),
    #[error("group rank must be at least 1")]
    ZeroRank,
    #[error("element is not a member of {kind}: {reason}")]
    NotMember { kind: GroupKind, reason: String },
    #[error("kinds differ: {0} vs {1}")]
    KindMismatch(GroupKind, GroupKind),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("configuration does not match graph: {0}")]
    GraphMismatch(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("slot {slot} out of range 1..={max}")]
    SlotOutOfRange { slot: usize, max: usize },
    #[error("size bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("malformed job: {0}")]
    MalformedJob(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
