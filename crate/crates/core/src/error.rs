use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A dense table would exceed the configured memory guard.
    #[error("size guard exceeded for {what}: {requested} entries requested, limit {limit}{hint}")]
    Size {
        what: String,
        requested: u128,
        limit: u128,
        hint: String,
    },

    #[error("no convergence after {iterations} iterations (last value {last})")]
    Convergence { iterations: usize, last: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    pub(crate) fn size(what: impl Into<String>, requested: u128, limit: u128) -> Self {
        Error::Size { what: what.into(), requested, limit, hint: String::new() }
    }

    pub(crate) fn size_with_hint(
        what: impl Into<String>,
        requested: u128,
        limit: u128,
        hint: impl Into<String>,
    ) -> Self {
        Error::Size { what: what.into(), requested, limit, hint: format!(" ({})", hint.into()) }
    }

    pub fn is_size(&self) -> bool {
        matches!(self, Error::Size { .. })
    }
}
