use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("norm diverges: {0}")]
    NormDiverges(String),

    #[error("spectral parameter {0} lies on the essential spectrum [0, inf)")]
    EssentialSpectrum(String),

    #[error("inadmissible exponents: {0}")]
    InadmissibleExponents(String),

    #[error("exponent out of range: {0}")]
    Exponent(String),

    #[error("branch error: {0}")]
    Branch(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("characteristic function too small on contour (min |F| = {min_abs:e})")]
    ContourThroughZero { min_abs: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Io(_)
            | Error::InadmissibleExponents(_)
            | Error::Exponent(_)
            | Error::Domain(_)
            | Error::EssentialSpectrum(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
