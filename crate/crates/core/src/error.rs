use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis matrices are linearly dependent (gram determinant {det:e})")]
    DependentBasis { det: f64 },

    #[error("invalid lattice basis: {0}")]
    InvalidBasis(String),

    #[error("radius {radius} needs an estimated {estimate:e} nodes, above the budget of {budget:e}")]
    RadiusTooLarge {
        radius: f64,
        estimate: f64,
        budget: f64,
    },

    #[error("invalid field data: {0}")]
    InvalidFieldData(String),

    #[error("unsupported index {0}: only index 2 has built-in support")]
    UnsupportedIndex(usize),

    #[error("non-vanishing determinant violated at coefficients {coeffs:?}")]
    NvdViolation { coeffs: Vec<i64> },

    #[error("zero determinant at coefficients {coeffs:?}")]
    ZeroDeterminantEncountered { coeffs: Vec<i64> },

    #[error("lattice is not a diagonal number-field lattice")]
    NotANumberFieldLattice,

    #[error("lattice has no exact determinant evaluator")]
    NoExactDeterminant,

    #[error("insufficient range for a growth fit: {0}")]
    InsufficientRange(String),

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("rank too small: {0}")]
    RankTooSmall(String),

    #[error("minimum of the normalized highest weight is attained at several indices {0:?}")]
    NonUniqueMinimum(Vec<usize>),

    #[error("ramified prediction needs an even index, got {0}")]
    OddIndexRamified(usize),

    #[error("lattice cannot be used for a QAM codebook: {0}")]
    UnsupportedLattice(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown code name {0:?}")]
    UnknownCode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
