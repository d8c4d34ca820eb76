use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width {0} outside 0..=128")]
    WidthOutOfRange(usize),

    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("dimension {0} outside 1..=32")]
    DimensionOutOfRange(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("relation {index} does not collapse into the central layer")]
    NonCentralRelation { index: usize },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("inconsistent presentation: {count} overlap violations, first {first}")]
    Inconsistent { count: usize, first: String },

    #[error("map {label} is not a homomorphism: relation {relation} fails")]
    NotHomomorphism { label: String, relation: String },

    #[error("map {label} is not bijective: image has order 2^{image_log2}, expected 2^{expected_log2}")]
    NotBijective {
        label: String,
        image_log2: usize,
        expected_log2: usize,
    },

    #[error("closure exceeded budget of {0} elements")]
    ClosureBudgetExceeded(usize),

    #[error("element is not in the subgroup")]
    NotInSubgroup,

    #[error("subgroup of order 2^{0} is too large to enumerate")]
    SmallTooLarge(usize),

    #[error("{what} of size {size} exceeds the desk-scale cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("connection set is not inverse-closed and identity-free")]
    SNotInverseClosed,

    #[error("survivor budget exceeded at depth {depth}: {count} > {cap}")]
    BudgetExceeded { depth: usize, count: usize, cap: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
