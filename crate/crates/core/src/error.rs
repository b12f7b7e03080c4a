use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or root search could not reach the requested accuracy
    /// within its configured budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Adaptive step-size control shrank the step below its floor.
    #[error("step size underflow at t = {t} (h = {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    /// A size guard (edge count, state size) was tripped.
    #[error("resource guard: {0}")]
    Resource(String),

    /// An invariant check failed at run time.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed result table: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
