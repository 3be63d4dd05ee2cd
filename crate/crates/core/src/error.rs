use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("nonzero diagonal entry at vertex {0}")]
    DiagonalEntry(usize),

    #[error("edge ({0}, {1}) stored with explicit zero weight")]
    ExplicitZeroEdge(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex set of size {size} is too small (need at least {min})")]
    TooSmall { size: usize, min: usize },

    #[error("zero matrix with zero shift admits no rescaling")]
    ZeroMatrix,

    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration budget exceeded: {required} items required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("no samples qualify for the requested conditioning")]
    EmptyDistribution,

    #[error("undefined ratio: denominator rate is zero (numerator {num}, denominator {den})")]
    UndefinedRatio { num: f64, den: f64 },

    #[error("clique complex is not downward closed: {0}")]
    NonClosedComplex(String),

    #[error("clique list mixes sizes {0} and {1}")]
    MixedCliqueSizes(usize, usize),

    #[error("duplicate clique {0:?}")]
    DuplicateClique(Vec<usize>),

    #[error("distribution is not normalized (total mass {0})")]
    Unnormalized(f64),

    #[error("normalization undefined: C({modes}, {photons}) < 2")]
    NormalizationUndefined { modes: usize, photons: usize },

    #[error("cell ({0}, {1}) lies outside the grid")]
    OutOfGrid(usize, usize),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("not a clique: {0:?}")]
    NotAClique(Vec<usize>),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
