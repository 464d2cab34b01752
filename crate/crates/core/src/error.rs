use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter index {index} is outside rank {rank}")]
    IndexOutOfRank { index: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("bad generator indices ({i}, {j}) at rank {rank}")]
    BadIndices { i: usize, j: usize, rank: usize },

    #[error("`{name}` is not defined at rank {rank}")]
    UnsupportedRank { name: String, rank: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("endomorphism is not an automorphism")]
    NotAnAutomorphism,

    #[error("order exceeds cap {cap}")]
    OrderCapExceeded { cap: u64 },

    #[error("Nielsen reduction exceeded its step budget of {budget}")]
    StepBudgetExceeded { budget: u64 },

    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("integer overflow in matrix arithmetic")]
    Overflow,

    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: i64 },

    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(i64),

    #[error("closure exceeded cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },

    #[error("rank {rank} too large (maximum {max})")]
    RankTooLarge { rank: usize, max: usize },

    #[error("element is not in the group")]
    ElementNotInGroup,

    #[error("neither conjugation orientation matches the expected value")]
    NoOrientationMatches {
        forward: String,
        backward: String,
        expected: String,
    },

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("{0}")]
    Semantic(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    /// True for errors that signal an exhausted resource cap rather than a
    /// mathematical verdict.
    pub fn is_cap_exceeded(&self) -> bool {
        matches!(
            self,
            Error::OrderCapExceeded { .. }
                | Error::StepBudgetExceeded { .. }
                | Error::ClosureCapExceeded { .. }
                | Error::Overflow
        )
    }
}
