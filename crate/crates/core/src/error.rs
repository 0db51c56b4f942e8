use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("generator `{generator}`: {message}")]
    Semantic { generator: String, message: String },

    #[error("letter {letter} is out of range for an alphabet of degree {degree}")]
    LetterOutOfRange { letter: usize, degree: usize },

    #[error("level {level} has {size} vertices, above the cap of {cap}")]
    LevelCap { level: usize, size: u128, cap: usize },

    #[error("budget exceeded ({what}): limit {limit}, frontier reached {frontier}")]
    BudgetExceeded {
        what: &'static str,
        limit: usize,
        frontier: usize,
    },

    #[error("completion incomplete after {rules} rules and {steps} steps")]
    Incomplete { rules: usize, steps: usize },

    #[error("unknown group `{0}`")]
    UnknownGroup(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::LevelCap { .. })
    }
}
