use thiserror::Error;

/// Errors shared by all toolkit modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An input failed a precondition (non-finite, out of range, wrong sign).
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// A physically forbidden regime was requested (e.g. imaginary momentum).
    #[error("domain error: {0}")]
    Domain(String),

    /// A window or branch holds too little norm to yield meaningful moments.
    #[error("empty branch: {0}")]
    EmptyBranch(String),

    /// The phase-space quadrature does not cover the supports of the inputs.
    #[error("phase-space coverage error: {0}")]
    Coverage(String),

    /// A numerical procedure failed to converge or to bracket its target.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { name, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
