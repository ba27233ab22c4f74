use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible lattices: K={left} cannot be combined with K={right}")]
    IncompatibleLattice { left: usize, right: usize },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("non-finite state at step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("initial conditions fail the spanning check: {fraction:.4} of the grid is degenerate (limit {threshold:.4})")]
    Spanning { fraction: f64, threshold: f64 },

    #[error("prior rejection rate exceeded 99.9% over {tries} tries; increase the ball radius or reduce tau0")]
    PriorRejection { tries: usize },

    #[error("quadrature refused: parameter dimension {dim} exceeds the limit of {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("budget guard: estimated {estimated} PDE solves exceeds the budget of {budget}")]
    Budget { estimated: usize, budget: usize },

    #[error("malformed {what}: {reason}")]
    Parse { what: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status: 2 for bad input, 3 for numerical or I/O
    /// failure, 4 for the budget guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 4,
            Error::NonFinite { .. } | Error::PriorRejection { .. } | Error::Io(_) => 3,
            _ => 2,
        }
    }

    pub fn parse(what: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            what: what.into(),
            reason: reason.into(),
        }
    }
}
