use thiserror::Error;

/// Errors raised by the solver and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("field shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("grid cap exceeded: {points} points requested, cap is {cap}")]
    GridCapExceeded { points: usize, cap: usize },

    #[error("blow-up guard tripped at t = {time}: `{name}` = {value}")]
    BlowUp { time: f64, name: String, value: f64 },

    #[error("temporal aliasing: max |xi|^2 * dt = {product} exceeds pi")]
    TemporalAliasing { product: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
