use thiserror::Error;

use crate::optim::RunRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("search direction is not a descent direction (slope {slope})")]
    NonDescent { slope: f64 },

    #[error("line search exhausted after {fev_used} evaluations (last alpha {alpha})")]
    LineSearchExhausted { alpha: f64, value: f64, fev_used: usize },

    #[error("run diverged at iteration {} (non-finite loss or gradient)", .record.iterations())]
    Diverged { record: Box<RunRecord> },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }
}
