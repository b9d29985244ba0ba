use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the range a model is valid for.
    #[error("{quantity} = {value:e} is outside the valid range [{min:e}, {max:e}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quasi-phase-matching fit failed: {reason} (residual {residual:e} rad/m)")]
    Fit { reason: String, residual: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// The state carries no amplitude, e.g. after a filter removed everything.
    #[error("empty state: {0}")]
    EmptyState(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Bad invocation, such as an unknown scenario name.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("z integration did not converge: change {change:e} on doubling steps exceeds {tolerance:e}")]
    Convergence { change: f64, tolerance: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
