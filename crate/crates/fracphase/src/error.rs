use thiserror::Error;

/// Errors produced by solver and certification routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The evolving state violates a scheme invariant (e.g. negative radicand).
    #[error("state error: {0}")]
    State(String),

    /// The scalar auxiliary-variable equation lost its pivot.
    #[error("singular step at n={n} (alpha={alpha}): |pivot|={pivot:.3e}")]
    SingularStep { n: usize, alpha: f64, pivot: f64 },

    /// A run configuration is inconsistent or incomplete.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
