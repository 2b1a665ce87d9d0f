use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// Malformed config text; `line` is 1-based.
    #[error("config line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },

    /// A config key that parsed but whose value is unusable.
    #[error("config line {line}, field `{field}`: {msg}")]
    ConfigField {
        line: usize,
        field: String,
        msg: String,
    },

    /// Cross-field constraint violated after parsing.
    #[error("config: {0}")]
    ConfigInvariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
