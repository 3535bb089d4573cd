use thiserror::Error;

/// Errors raised by the ranking kernels.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("query group is empty")]
    EmptyGroup,

    #[error("score of item {index} is not finite")]
    InvalidScore { index: usize },

    #[error("grade {grade} is outside the alphabet 0..{num_grades}")]
    GradeOutOfRange { grade: u32, num_grades: u32 },

    #[error("a grade alphabet needs at least 2 levels, got {0}")]
    TooFewGrades(u32),

    #[error("grade {0} is too large for exponential gain (max 30)")]
    GradeTooLarge(u32),

    #[error("threshold {threshold} is outside 0..={max}")]
    ThresholdOutOfRange { threshold: u32, max: u32 },

    #[error("sequence contains grade {0}; expected only 0 and 1")]
    NonBipartite(u32),

    #[error("{size} items exceed the exhaustive limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, RankError>;
