use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated a named constraint.
    #[error("invalid parameter: {constraint} (got {value})")]
    Parameter { constraint: String, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    /// Bracket expansion ran past the overflow guard.
    #[error("saturation: {0}")]
    Saturation(String),

    /// The Sobolev-conjugate integral does not exist for this dimension.
    #[error("divergence: {0}")]
    Divergence(String),

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    /// Mountain-pass geometry could not be established.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Problem outside the admissible exponent window.
    #[error("inadmissible problem: {0}")]
    Admissibility(String),

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(constraint: impl Into<String>, value: f64) -> Self {
        Error::Parameter {
            constraint: constraint.into(),
            value,
        }
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

pub type Result<T> = std::result::Result<T, Error>;
