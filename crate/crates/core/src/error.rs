use std::path::PathBuf;

/// Errors raised by the sensing, likelihood, solver and harness layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Shapes or sizes that do not fit together.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A parameter outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Input data that cannot be processed (NaN, non-binary bits, ...).
    #[error("data error: {0}")]
    Data(String),
    /// Non-finite values produced during iteration.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::Dimension(msg.into())
}

pub(crate) fn param_err(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
