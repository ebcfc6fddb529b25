use thiserror::Error;

/// Errors raised by the charge algebra, the extraction engine and the
/// scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("algebra mismatch: operands live on different set algebras")]
    AlgebraMismatch,

    #[error("event refers to atom {atom} but the algebra has {atoms} atoms")]
    ForeignEvent { atom: usize, atoms: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("refusing to enumerate partitions of {atoms} atoms (cap is {cap})")]
    EnumerationCap { atoms: usize, cap: usize },

    #[error("product ground set of size {size} exceeds the cap {cap}")]
    GroundCap { size: usize, cap: usize },

    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("negative value {value} at atom {atom} where a non-negative charge is required")]
    Negative { atom: usize, value: f64 },

    #[error("not a probability: {0}")]
    NotProbability(String),

    #[error("sequence is not increasing at index {index} (atom {atom})")]
    NotMonotone { index: usize, atom: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty input sequence")]
    EmptySequence,

    #[error("independence fails between coordinate blocks {first:?} and {second:?}")]
    NotIndependent { first: Vec<usize>, second: Vec<usize> },

    #[error("charge {index} is not representable over coordinate algebra {coordinate}: {reason}")]
    NotRepresentable {
        index: usize,
        coordinate: usize,
        reason: String,
    },

    #[error("conditioning on a null cylinder after {observed} observations (prior {prior})")]
    NullConditioning { prior: usize, observed: usize },

    #[error("point {point} is not covered by any bin")]
    UnmappedPoint { point: usize },

    #[error("sequence is not bounded in probability: {0}")]
    NotBounded(String),

    #[error("block schedule infeasible at r = {r}: {reason}")]
    Schedule { r: usize, reason: String },

    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("generator `{generator}` is incompatible with pipeline `{pipeline}`")]
    Incompatible { generator: String, pipeline: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
