use thiserror::Error;

/// Everything that can stop a `clt` invocation.
#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` and friends: not a failure, but no run either.
    #[error("{0}")]
    Help(String),

    /// Bad invocation; the message is the text shown to the user.
    #[error("{0}")]
    Usage(String),

    #[error("cannot parse {key} value '{token}': {message}")]
    Parse {
        key: String,
        token: String,
        message: String,
    },

    /// A parameter set violating a structural constraint such as P(0) = 0.
    #[error("{0}")]
    Constraint(String),

    #[error(transparent)]
    Compute(#[from] critline::Error),

    /// The run finished but a checked quantity fell outside its tolerance.
    #[error("{0}")]
    Tolerance(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Constraint(_) => 2,
            CliError::Compute(_) | CliError::Tolerance(_) | CliError::Io(_) => 1,
        }
    }

    /// Stable machine-readable tag, reported in JSON mode.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Help(_) => "help",
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Constraint(_) => "constraint",
            CliError::Compute(e) => e.code(),
            CliError::Tolerance(_) => "tolerance",
            CliError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
