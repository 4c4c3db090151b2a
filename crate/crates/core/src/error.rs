use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error(
        "vertex cap of {cap} exceeded at time {time} \
         ({activated} vertices activated, {pending} candidates pending)"
    )]
    VertexCap {
        cap: usize,
        time: f64,
        activated: usize,
        pending: usize,
    },

    #[error("query {what} is beyond the simulated horizon {horizon}")]
    OutOfHorizon { what: String, horizon: f64 },

    #[error(
        "alternating sum is ill-conditioned (condition number {condition:e}); \
         use the high-precision path (nu_n_high_precision)"
    )]
    Precision { condition: f64 },

    #[error("argument {arg} is outside the domain of {curve}")]
    Domain { curve: &'static str, arg: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("percolation parameters are not subcritical (kappa = {kappa}, p*delta = {mean})")]
    Supercritical { kappa: f64, mean: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
