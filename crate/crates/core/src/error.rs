use thiserror::Error;

/// Errors raised by model construction, analysis and I/O.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown event `{0}`")]
    InvalidEvent(String),
    #[error("unknown state `{0}`")]
    InvalidState(String),
    #[error("duplicate event `{0}`")]
    DuplicateEvent(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("transition `{0}` is not part of the automaton")]
    UnknownTransition(String),
    #[error("transition `{0}` carries an uncontrollable event and cannot be disabled")]
    UncontrollableCut(String),
    #[error("automaton has no initial state")]
    EmptyInitial,
    #[error("empty state estimate")]
    EmptyEstimate,
    #[error("observer events are not observable events of the left operand: {0}")]
    AlphabetMismatch(String),
    #[error("invalid estimate index {0}")]
    InvalidEstimate(usize),
    #[error("oracle exploration exceeded cap {cap} before saturating")]
    OracleUnsound { cap: usize },
    #[error("{count} controllable transitions exceed the exhaustive search limit of {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared reference `{name}` at {location}")]
    UnknownReference { name: String, location: String },
    #[error("model declares no states")]
    EmptyModel,
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u64),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
