use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("missing derivative samples")]
    MissingDerivative,
    #[error("non-convergent tail: {0}")]
    NonConvergentTail(String),
    #[error("fast mode needs |xi| > 2, got {0}")]
    FastModeRange(f64),
    #[error("root finder failure: {0}")]
    RootFinder(String),
    #[error("no convergence after {iterations} iterations (last increment {last:e})")]
    NonConvergence { iterations: usize, last: f64 },
    #[error("root finder stagnated: {0}")]
    Stagnation(String),
    #[error("step size collapse at y = {0}")]
    StepCollapse(f64),
    #[error("fit residual too large: {0}")]
    FitResidual(String),
    #[error("stationary point outside resolved range: {0}")]
    StationaryOutOfRange(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures that mean "the iteration did not converge".
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Stagnation(_)
                | Error::StepCollapse(_)
                | Error::RootFinder(_)
                | Error::FitResidual(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
