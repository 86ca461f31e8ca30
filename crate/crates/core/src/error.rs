use thiserror::Error;

use crate::ground::CellShape;

/// Errors shared by all library modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set must contain at least one atom")]
    EmptyGround,

    #[error("atom {atom} is outside the ground set of size {ground}")]
    AtomOutOfRange { atom: u32, ground: u32 },

    #[error("elements must be strictly increasing")]
    NotStrictlyIncreasing,

    #[error("tuple arity {left} does not match arity {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("tuple does not match cell shape {shape}")]
    ShapeMismatch { shape: CellShape },

    #[error("rank {rank} out of range for cell of size {size}")]
    RankOutOfRange { rank: u64, size: u64 },

    #[error("cell size overflows u64")]
    CellTooLarge,

    #[error("sequence entries must be pairwise distinct")]
    NotInjective,

    #[error("assignment must be defined on all {expected} subsets, got {actual}")]
    IncompletePowersetDomain { expected: u64, actual: u64 },

    #[error("value is not in the image of the encoding: {reason}")]
    NotInImage { reason: String },

    #[error("family is not an F-image under the given context")]
    NotAnFImage,

    #[error("context requires k_i <= l_i at coordinate {coord}")]
    ShapeNotDominated { coord: usize },

    #[error("ground set of size {actual} is too small; at least {required} atoms required")]
    GroundTooSmall { required: u64, actual: u64 },

    #[error("not an encoded image: {reason} (cell {cell}, stage {stage})")]
    NotAPhiImage {
        cell: CellShape,
        stage: u32,
        reason: String,
    },

    #[error("undecodable member size {size}")]
    UndecodableSize { size: u64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("search space too large: {cost} exceeds limit {limit}")]
    SearchSpaceExceeded { cost: String, limit: String },

    #[error("permutation moves atom {atom} outside the allowed set")]
    MovesOutsideDomain { atom: u32 },

    #[error("no equivalent pair exists in the given pool")]
    NoPair,

    #[error("permutation action undefined: {0}")]
    ActionUndefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
