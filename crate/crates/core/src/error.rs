use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The presentation of a subgroup could not be certified within the configured bounds.
    #[error("cannot certify presentation: {0}")]
    Uncertified(String),

    /// A bounded search ran out without proving or excluding membership.
    #[error("undecided: {0}")]
    Undecided(String),

    #[error("index {index} lies outside the sample window [-{radius}, {radius}]")]
    OutOfWindow { index: i64, radius: i64 },

    #[error("insufficient window: radius {needed} required, {available} available")]
    InsufficientWindow { needed: i64, available: i64 },

    #[error("threshold {theta:e} is below the resolution floor {floor:e} of the window")]
    BelowResolution { theta: f64, floor: f64 },

    #[error("exact rational data required, got floating data")]
    NotExact,

    #[error("unsupported subgroup shape: {0}")]
    UnsupportedSubgroup(String),

    #[error("functions live on different domains")]
    DomainMismatch,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
