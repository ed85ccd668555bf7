use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure has negative mass where a positive measure is required")]
    SignedMeasure,

    #[error("Lebesgue budget must be a nonnegative number, got {0}")]
    NegativeBudget(f64),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("state {state:?} is not admissible: {reason}")]
    NonAdmissibleState { state: Vec<f64>, reason: String },

    #[error("Riemann solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("budget exceeded at t = {time}: {reason}")]
    BudgetExceeded { time: f64, reason: String },

    #[error("time {time} is outside the simulated range [0, {end}]")]
    TimeOutOfRange { time: f64, end: f64 },

    #[error("operation requires a scalar system, got {0} equations")]
    NotScalar(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. }
            | Error::NoConvergence { .. }
            | Error::NonAdmissibleState { .. } => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
