//! Telegraph-type random motion on the line with two alternating velocities
//! `c` and `-v`, whose sojourn times form an alternating renewal process with
//! gamma-distributed forward (`λ`, `α`) and backward (`μ`, `β`) durations.
//!
//! The crate provides
//!
//! - [`specfun`]: log-gamma and the regularized incomplete gamma functions,
//! - [`law`]: the exact conditional law of `(X_t, V_t)` (atom, forward and
//!   backward densities, boundary limits),
//! - [`moments`]: the conditional mean of `X_t` for identically distributed
//!   sojourns, plus the Erlang closed forms,
//! - [`simulate`]: an exact, reproducible Monte Carlo sampler,
//! - [`quadrature`] and [`harness`]: tanh-sinh integration and the
//!   analytic-versus-empirical validation report.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod law;
pub mod moments;
pub mod quadrature;
pub mod series;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use law::{
    atom_probability, backward_density, boundary_limit, density, density_grid, forward_density, BoundaryCase,
    ExtendedReal, InitialVelocity, LawPoint, MotionParams, SpaceTimePoint,
};
pub use moments::{
    erlang_mean_closed_form, erlang_parity_expectation, mean_conditional, parity_expectation,
    SymmetricGammaParams,
};
pub use harness::{integrate_density, validate, validate_with, ValidationConfig, ValidationReport};
pub use series::SeriesControl;
pub use simulate::{ensemble, path_rng, sample_gamma, sample_path, EmpiricalLaw, PathSample};
pub use specfun::{log_gamma, reg_lower_gamma, reg_upper_gamma, upper_gamma, GammaPair, RegularizedGammaArgs};
