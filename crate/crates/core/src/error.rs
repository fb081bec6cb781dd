use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is missing, out of range or inconsistent.
    #[error("invalid config: {field}: {message}")]
    Config { field: String, message: String },

    /// A coupling function was evaluated outside its tabulated range.
    #[error("position {q} outside tabulated range [{min}, {max}]")]
    Domain { q: f64, min: f64, max: f64 },

    /// The position grid does not cover every packet center +/- 8 sigma.
    #[error(
        "grid [{grid_min}, {grid_max}] does not cover the state; need at least [{required_min}, {required_max}]"
    )]
    Coverage {
        grid_min: f64,
        grid_max: f64,
        required_min: f64,
        required_max: f64,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("ill-conditioned fit: {0}")]
    Fit(String),

    #[error("not converged: {0}")]
    Convergence(String),

    #[error("too few samples: {requested} (minimum {minimum})")]
    Samples { requested: usize, minimum: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
