use thiserror::Error;

/// Errors raised anywhere in the wreath decomposition pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("group closure exceeded the element cap of {cap}")]
    GroupTooLarge { cap: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("discriminant mismatch: sqrt({left}) vs sqrt({right})")]
    DiscriminantMismatch { left: u64, right: u64 },

    #[error("invalid discriminant {0}: must be a square-free positive integer")]
    InvalidDiscriminant(u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("mapping space {symbols}^{positions} exceeds the budget of {budget} codes")]
    BudgetExceeded { symbols: u32, positions: usize, budget: u64 },

    #[error("dense dimension {dim} exceeds the oracle cap {cap}")]
    OracleCapExceeded { dim: u64, cap: u64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("symbol count mismatch: orbit table uses {table}, local data has {local}")]
    SymbolCountMismatch { table: u32, local: usize },

    #[error("local group is intransitive on {0} points")]
    IntransitiveLocalGroup(usize),

    #[error("invalid projector set: {0}")]
    InvalidProjectors(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("checksum failure: {what} sums to {found}, expected {expected}")]
    Checksum { what: String, found: String, expected: String },

    #[error("orbit count {found} disagrees with the orbit-counting lemma ({expected})")]
    OracleDisagreement { found: u64, expected: String },

    #[error("burnside sum is not divisible by the group order")]
    NonIntegralBurnside,

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
