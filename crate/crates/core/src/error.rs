use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("empty program")]
    EmptyInput,

    #[error("{position} is not a position of {program}")]
    InvalidPosition { program: String, position: String },

    #[error("invalid execution step {from} -> {to}")]
    InvalidStep { from: String, to: String },

    #[error("non-conservative at {subterm}")]
    NonConservative { subterm: String },

    #[error("program contains a loop; an iteration bound is required")]
    UnboundedLoop,

    #[error("interval {0} is not finitely complemented")]
    NotFinitelyComplemented(String),

    #[error("invalid interval: {low} is not below {high}")]
    InvalidInterval { low: String, high: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unsupported program shape: {0}")]
    UnsupportedShape(String),

    #[error("malformed json: {0}")]
    Json(String),
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::EmptyInput => "empty-input",
            Error::InvalidPosition { .. } => "invalid-position",
            Error::InvalidStep { .. } => "invalid-step",
            Error::NonConservative { .. } => "non-conservative",
            Error::UnboundedLoop => "unbounded-loop",
            Error::NotFinitelyComplemented(_) => "not-finitely-complemented",
            Error::InvalidInterval { .. } => "invalid-interval",
            Error::InvalidGrid(_) => "invalid-grid",
            Error::UnsupportedShape(_) => "unsupported-shape",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
