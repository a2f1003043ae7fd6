use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine could not reach its tolerance.
    #[error("accuracy target {tol:e} not met: best estimate {estimate}, error bound {error_bound:e}")]
    Accuracy {
        estimate: f64,
        error_bound: f64,
        tol: f64,
    },

    /// A quantity that has no closed form for this parameter.
    #[error("{0} is not available")]
    NotAvailable(&'static str),

    #[error("initialization failed: {0}")]
    Init(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
