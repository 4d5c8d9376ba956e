use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("AR model is not causal (minimum root modulus {min_modulus:.6})")]
    NonCausal { min_modulus: f64, moduli: Vec<f64> },

    #[error("insufficient presample: need {needed} values before the body, have {available}")]
    InsufficientPresample { needed: usize, available: usize },

    #[error("too few observations: need at least {needed}, have {available}")]
    TooShort { needed: usize, available: usize },

    #[error("degenerate autocovariance (condition estimate {condition:.3e})")]
    DegenerateAutocovariance { condition: f64 },

    #[error("degenerate residual spread")]
    DegenerateSpread,

    #[error("error law {0} has no closed-form cdf")]
    MissingCdf(String),

    #[error("replication {rep_id} (n = {n}) failed: {source}")]
    Replication {
        rep_id: usize,
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by numerically degenerate data rather than bad input.
    pub fn is_degenerate(&self) -> bool {
        match self {
            Error::DegenerateAutocovariance { .. } | Error::DegenerateSpread => true,
            Error::Replication { source, .. } => source.is_degenerate(),
            _ => false,
        }
    }
}
