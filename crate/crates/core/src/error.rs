use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The point lies within the excluded band next to an endpoint of the
    /// support; use [`crate::law::boundary_limit`] instead.
    #[error("x = {x} is within {band:e} of the support endpoint {endpoint} at t = {t}; use boundary_limit")]
    NearBoundary {
        x: f64,
        t: f64,
        endpoint: f64,
        band: f64,
    },

    #[error("series did not converge after {terms} terms (partial sum {partial_sum:e})")]
    Convergence { partial_sum: f64, terms: usize },

    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
