use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrices live over different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u32, u32),

    #[error("matrix is singular")]
    Singular,

    #[error("subspaces have different ambient dimensions ({0} vs {1})")]
    AmbientMismatch(usize, usize),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("modules are not defined on the same grid")]
    GridMismatch,

    #[error("morphism is not natural: {0}")]
    NotNatural(String),

    #[error("ob-morphism is not invertible: open component {0} is singular")]
    NotObInvertible(usize),

    #[error("piece indices out of order: {from} > {to}")]
    PieceOrder { from: usize, to: usize },

    #[error("rectangle corner {0} coincides with a critical value")]
    CornerOnCritical(String),

    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),

    #[error("expected s < t, got s = {0}, t = {1}")]
    EmptyRange(String, String),

    #[error("shift amount must be nonnegative, got {0}")]
    NegativeShift(String),

    #[error("epsilon {eps} is below the matching cost {cost}")]
    EpsilonBelowCost { eps: String, cost: String },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("cannot parse number {0:?}")]
    ParseReal(String),
}
