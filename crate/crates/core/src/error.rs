use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input index {index} out of range for {n} variables")]
    InputOutOfRange { index: u64, n: u32 },

    #[error("variable count {n} outside the supported range 1..={max}")]
    VariableCount { n: u32, max: u32 },

    #[error("block mask {mask:#x} is not a subset of the {n} variables")]
    BlockOutOfRange { mask: u64, n: u32 },

    #[error("block {mask:#x} is not sensitive at input {input:#x}")]
    NotSensitive { mask: u64, input: u64 },

    #[error("blocks {first:#x} and {second:#x} overlap")]
    OverlappingBlocks { first: u64, second: u64 },

    #[error("resource limit: {what} ({needed} > cap {cap})")]
    ResourceLimit { what: String, needed: u128, cap: u128 },

    #[error("n must be even, got {0}")]
    OddParameter(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("origin is not red")]
    OriginNotRed,

    #[error("no blue point within cap {cap} on axis {axis}")]
    NoBlueOnAxis { axis: usize, cap: u64 },

    #[error("inner coloring has red sensitivity {0}, expected 1")]
    InnerRedSensitivity(usize),

    #[error("coloring is not a conforming sliced coloring: {0}")]
    NotConforming(String),

    #[error("no exact measurement method for this coloring: {0}")]
    NoExactMethod(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn resource(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::ResourceLimit { what: what.into(), needed, cap }
    }
}
