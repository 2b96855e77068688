use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the region where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data breaks a structural invariant (non-positive density, grid mismatch, ...).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// The problem collapses to a trivial solution.
    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e}): {detail}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        detail: String,
    },

    /// The shear profile vanished before the edge speed was reached.
    #[error("premature separation: shear vanished at u = {u:.6e} before the edge speed {edge:.6e}")]
    PrematureSeparation { u: f64, edge: f64 },

    #[error("Newton iteration stagnated after {iterations} iterations with residual {residual:.3e}")]
    Stagnation { iterations: usize, residual: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for failures of an iterative solver rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::PrematureSeparation { .. }
                | Error::Stagnation { .. }
                | Error::Degenerate(_)
        )
    }
}
