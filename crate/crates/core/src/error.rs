use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Shapes or sizes of arguments are inconsistent.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The response has a single class, so the likelihood has no finite maximizer.
    #[error("separation: {0}")]
    Separation(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A sample carries no information about the quantity being estimated.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Every replicate of a Monte-Carlo experiment failed.
    #[error("experiment failed: {0}")]
    Experiment(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
