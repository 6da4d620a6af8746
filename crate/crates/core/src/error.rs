use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range {range}")]
    Range {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("pole at {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("accuracy lost: {0}")]
    Accuracy(String),

    #[error("ill-conditioned evaluation: {0}")]
    Conditioning(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Range { .. } => "range",
            Error::Pole(_) => "pole",
            Error::Domain(_) => "domain",
            Error::Constraint(_) => "constraint",
            Error::Accuracy(_) => "accuracy",
            Error::Conditioning(_) => "conditioning",
            Error::Config(_) => "config",
        }
    }

    pub(crate) fn range(what: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::Range {
            what,
            value,
            range: range.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
