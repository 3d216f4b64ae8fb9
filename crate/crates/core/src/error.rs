use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("{0}")]
    Domain(String),

    /// A numerical routine produced a result outside its accuracy guarantees.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(String),

    /// A failure inside a sweep, tagged with the evaluation point.
    #[error("{curve} at tau={tau}: {source}")]
    AtPoint {
        curve: String,
        tau: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True when the root cause is a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Numerical(_) => true,
            Error::Domain(_) | Error::Io(_) => false,
            Error::AtPoint { source, .. } => source.is_numerical(),
        }
    }
}
