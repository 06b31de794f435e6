use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// One or more configuration fields violate their invariants.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("invalid sensor reading: {0}")]
    Reading(String),

    #[error("invalid action catalog: {0}")]
    Catalog(String),

    #[error("column {column} out of range for a table with {width} columns")]
    ColumnOutOfRange { column: usize, width: usize },

    /// A step was begun twice, or completed without being begun.
    #[error("step phase violation: {0}")]
    Phase(&'static str),

    #[error("unknown profile preset {name:?}; valid presets: {}", .valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("invalid questionnaire answer: {0}")]
    Questionnaire(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(vec![msg.into()])
    }
}
