use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter index {index} out of range for an alphabet of {size} generators")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("words are over different alphabets")]
    AlphabetMismatch,

    #[error("invalid generator name `{0}`")]
    InvalidName(String),

    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("word is not a member of the subgroup")]
    NotAMember,

    #[error("invalid presentation{}: {reason}", index.map(|i| format!(" (generator pair {})", i + 1)).unwrap_or_default())]
    InvalidPresentation {
        index: Option<usize>,
        reason: String,
    },

    #[error("cosets live on different sides of the amalgam")]
    SideMismatch,

    #[error("representative policy not applicable: {0}")]
    InvalidPolicy(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}
