use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FairError {
    #[error("label sequence has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("clusterings cover different point counts ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("cluster id {id} out of range (k = {k})")]
    BadClusterId { id: usize, k: usize },

    #[error("ratio components must be positive (got {p}:{q})")]
    ZeroRatio { p: usize, q: usize },

    #[error("no fair clustering exists: {blue} blue and {red} red points cannot be split at ratio {p}:{q}")]
    InfeasibleFairness {
        blue: usize,
        red: usize,
        p: usize,
        q: usize,
    },

    #[error("operation requires ratio 1:1, instance has {p}:{q}")]
    WrongRatio { p: usize, q: usize },

    #[error("monochromatic leftovers do not pair up ({red} red vs {blue} blue)")]
    UnbalancedTotals { red: usize, blue: usize },

    #[error("subset index {z} out of range (largest is {max})")]
    SubsetOutOfRange { z: usize, max: usize },

    #[error("surplus total {total} is not a multiple of {modulus}")]
    SurplusNotMultiple { total: usize, modulus: usize },

    #[error("deficit bookkeeping broke down: {0}")]
    InternalDeficitMismatch(String),

    #[error("clustering is not balanced")]
    NotBalanced,

    #[error("empty input")]
    EmptyInput,

    #[error("exponent must be at least 1 (got {0})")]
    InvalidExponent(String),

    #[error("n = {n} exceeds the exhaustive-search cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("3-partition input has {len} elements, not a multiple of 3")]
    NotDivisibleBy3 { len: usize },

    #[error("element {value} is outside the open interval (T/4, T/2) for T = {target}")]
    OutOfRangeElement { value: u64, target: String },

    #[error("cannot generate instance: {0}")]
    Infeasible(String),

    #[error("invalid file: {0}")]
    InvalidFile(String),

    #[error("transcript replay failed: {0}")]
    Replay(String),
}

pub type Result<T, E = FairError> = std::result::Result<T, E>;
