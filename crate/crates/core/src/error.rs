use thiserror::Error;

/// Errors raised by the risk, order and inference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("infinite mean: {0}")]
    InfiniteMean(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("ingestion error at row {row}: {message}")]
    Ingestion { row: usize, message: String },

    #[error("optimizer did not converge after {iterations} iterations")]
    Convergence {
        iterations: usize,
        trace: Vec<OptimizerStep>,
    },

    #[error("io error: {0}")]
    Io(String),
}

/// One iterate recorded by the logistic likelihood optimizer.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OptimizerStep {
    pub iteration: usize,
    pub location: f64,
    pub scale: f64,
    pub log_likelihood: f64,
    pub gradient_norm: f64,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_probability_open(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("probability {p} must lie in (0,1)")))
    }
}

pub(crate) fn check_level(p: f64) -> Result<()> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("level {p} must lie in [0,1)")))
    }
}
