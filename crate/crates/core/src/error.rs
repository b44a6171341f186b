use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Zeta requested too close to the pole at s = 1.
    #[error("zeta has a pole at s = 1 (requested s = {0})")]
    PoleAtOne(f64),
    /// The error budget could not be met with the configured maximum work.
    #[error("series did not meet the error budget {target} (best bound {achieved})")]
    NonConvergent { target: f64, achieved: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("quadrature order must be one of 8, 16, 32 (got {0})")]
    Order(usize),
    #[error("need at least {need} data points, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// Bad magic, version, or checksum in a cache file.
    #[error("bad cache file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
}
