use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {required} nodes, got {actual}")]
    Size { required: usize, actual: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("ODE integration diverged at u = {u}")]
    Divergence { u: f64 },

    #[error("singular pivot in block row {row}")]
    Singular { row: usize },

    #[error("no sign change on [{a}, {b}]")]
    NoBracket { a: f64, b: f64 },

    #[error("singular parametrization at (s, u) = ({s}, {u})")]
    SingularParametrization { s: f64, u: f64 },

    #[error("t = {t} is not reachable at s = {s} inside the u range")]
    OutOfRange { s: f64, t: f64 },

    #[error("Cauchy march degenerated at u = {u}: {reason}")]
    Degenerate { u: f64, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    #[error("h = {value} is not positive at time index {index}")]
    NonPositiveH { index: usize, value: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("simulation became unstable at t = {t}")]
    Unstable { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. }
                | Error::Singular { .. }
                | Error::SingularParametrization { .. }
                | Error::Degenerate { .. }
                | Error::Inconsistent(_)
                | Error::NonPositiveH { .. }
                | Error::Unstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
