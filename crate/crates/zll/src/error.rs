use thiserror::Error;

/// Library-wide error type. Variants map onto process exit codes:
/// config/usage -> 2, domain/range -> 3, numeric non-convergence -> 4, I/O -> 5.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series infeasible: sigma={sigma} needs ~{needed} terms, cap is {cap}")]
    SeriesInfeasible { sigma: f64, needed: f64, cap: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Domain(_) | Error::SeriesInfeasible { .. } => 3,
            Error::Numeric(_) => 4,
            Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
