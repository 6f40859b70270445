use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A symmetric factorization failed; the matrix is numerically singular.
    #[error("ill-conditioned system (condition estimate {cond:.3e}): {context}")]
    IllConditioned { cond: f64, context: String },
    /// The parameter-determination system has no usable solution.
    #[error("degenerate problem: {0}")]
    Degenerate(String),
    /// A numerical routine failed in a way that is not a caller error.
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
