use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GcrssError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate direction: {0}")]
    DegenerateDirection(String),
    #[error("divisibility: {0}")]
    Divisibility(String),
    #[error("conditioning: {0}")]
    Conditioning(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("rank deficiency: {0}")]
    RankDeficiency(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, GcrssError>;

impl GcrssError {
    /// Stable machine-readable identifier.
    pub fn kind(&self) -> &'static str {
        match self {
            GcrssError::InvalidInput(_) => "invalid_input",
            GcrssError::DegenerateDirection(_) => "degenerate_direction",
            GcrssError::Divisibility(_) => "divisibility",
            GcrssError::Conditioning(_) => "conditioning",
            GcrssError::TooLarge(_) => "too_large",
            GcrssError::RankDeficiency(_) => "rank_deficiency",
            GcrssError::NotApplicable(_) => "not_applicable",
            GcrssError::Parse { .. } => "parse",
        }
    }

    /// Numeric code, also used by the C interface.
    pub fn code(&self) -> i32 {
        match self {
            GcrssError::InvalidInput(_) => 1,
            GcrssError::DegenerateDirection(_) => 2,
            GcrssError::Divisibility(_) => 3,
            GcrssError::Conditioning(_) => 4,
            GcrssError::TooLarge(_) => 5,
            GcrssError::RankDeficiency(_) => 6,
            GcrssError::NotApplicable(_) => 7,
            GcrssError::Parse { .. } => 8,
        }
    }

    /// Process exit status: 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            GcrssError::InvalidInput(_)
            | GcrssError::Parse { .. }
            | GcrssError::TooLarge(_)
            | GcrssError::NotApplicable(_) => 2,
            GcrssError::DegenerateDirection(_)
            | GcrssError::Divisibility(_)
            | GcrssError::Conditioning(_)
            | GcrssError::RankDeficiency(_) => 3,
        }
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GcrssError::InvalidInput(msg.into()))
}
