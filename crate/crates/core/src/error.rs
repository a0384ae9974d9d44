use thiserror::Error;

/// Errors raised by the simulator and the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no events")]
    NoEvents,

    #[error("undefined bound: coincidence probability must be positive, got {0}")]
    UndefinedBound(f64),

    #[error("empty post-selected ensemble{}", .0.as_ref().map(|p| format!(" for setting pair {p}")).unwrap_or_default())]
    EmptyEnsemble(Option<String>),

    #[error("use equal_settings_bound for alpha = 0")]
    UseEqualSettingsBound,

    #[error("integral diverges at alpha = {0}")]
    Divergent(f64),

    #[error("quadrature did not reach tolerance: estimate {estimate}, error {error}")]
    QuadratureTolerance { estimate: f64, error: f64 },

    #[error("coincidence mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
