use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A singular kernel was point-sampled at its singularity.
    #[error("kernel evaluated at coincident points (r = {r}, z = {z})")]
    SingularEvaluation { r: f64, z: f64 },

    /// Mesh construction or lookup failed.
    #[error("invalid mesh: {0}")]
    Mesh(String),

    /// Block sizes do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The linear system is singular to working precision.
    #[error("singular system (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    /// Configuration could not be parsed or failed validation.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
