use thiserror::Error;

use crate::walkers::WalkState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("spectral series refused at t = {t} (below cutoff t_min = {t_min})")]
    BelowSeriesCutoff { t: f64, t_min: f64 },

    #[error("spectral series truncation not met after {terms} terms at t = {t}")]
    Truncation { t: f64, terms: usize },

    #[error("cdf inversion did not converge after {iterations} iterations, bracket [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("step budget of {budget} exceeded")]
    StepBudget { budget: u64, state: Box<WalkState> },

    #[error("grid too coarse: {nodes} nodes, need at least {min}")]
    GridTooCoarse { nodes: usize, min: usize },

    #[error("table exit mode requires a loaded tau table")]
    MissingTable,

    #[error("invalid table file: {0}")]
    Format(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
