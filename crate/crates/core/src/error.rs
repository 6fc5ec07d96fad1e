use thiserror::Error;

/// Errors raised by the library.
///
/// Model invalidity is reported as data through [`crate::spectral::ValidityReport`];
/// [`Error::InvalidModel`] only appears when an operation refuses to run on an
/// invalid model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("unsupported space: {0}")]
    Config(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("indefinite matrix: eigenvalue {eigenvalue:e} below tolerance {tolerance:e}")]
    Indefinite { eigenvalue: f64, tolerance: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
