use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The quadratic magnon Hamiltonian has no uniformly ordered ground state.
    #[error("unstable magnon mode: {0}")]
    Domain(String),

    #[error(
        "{quantity} not converged: changed by {change:.3e} (relative) when n_max was doubled from {n_max}"
    )]
    Convergence {
        quantity: String,
        change: f64,
        n_max: usize,
    },

    #[error("no level intersection in window [{lo}, {hi}]")]
    NotFound { lo: f64, hi: f64 },

    #[error("{count} candidate intersections in window [{lo}, {hi}]")]
    Ambiguous { lo: f64, hi: f64, count: usize },

    #[error("vanishing denominator {factor}")]
    Singularity { factor: String },

    #[error("insufficient span: {0}")]
    InsufficientSpan(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
