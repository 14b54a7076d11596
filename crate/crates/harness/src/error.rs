use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// A config value is missing, unknown or out of range.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    /// The config text is not valid TOML or has unknown keys.
    #[error("config syntax: {0}")]
    Syntax(String),

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: firefly_core::Error,
    },

    #[error("cannot aggregate an empty set of records")]
    Empty,

    #[error(transparent)]
    Core(#[from] firefly_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
