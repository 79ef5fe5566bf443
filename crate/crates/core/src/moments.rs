//! Conditional mean of `X_t` when forward and backward sojourns share one
//! gamma law `(λ, α)`.
//!
//! `E[X_t | V_0] = V_0 t + (c+v)/λ · sgn(V_0) · Σ_{k≥1} (-1)^k T_k` with
//! `T_k = λt P(kα,λt) - kα P(kα+1,λt) = λ ∫_0^t P(kα,λs) ds`.
//!
//! The alternating sums are accumulated in adjacent pairs `(2j-1, 2j)` and the
//! truncation rule is applied to the pair sums.

use crate::error::{domain, Result};
use crate::law::{InitialVelocity, MotionParams};
use crate::series::{sum_series, SeriesControl};
use crate::specfun::{gamma_pq, ln_gamma, shape_increment_bracket};

/// Speeds and a single gamma sojourn law shared by both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricGammaParams {
    pub c: f64,
    pub v: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl SymmetricGammaParams {
    pub fn new(c: f64, v: f64, lambda: f64, alpha: f64) -> Result<Self> {
        let p = Self { c, v, lambda, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.as_motion().validate()
    }

    pub fn as_motion(&self) -> MotionParams {
        MotionParams {
            c: self.c,
            v: self.v,
            lambda: self.lambda,
            alpha: self.alpha,
            mu: self.lambda,
            beta: self.alpha,
        }
    }

    /// `Some` iff `λ = μ` and `α = β`.
    pub fn from_motion(p: &MotionParams) -> Option<Self> {
        (p.lambda == p.mu && p.alpha == p.beta).then_some(Self {
            c: p.c,
            v: p.v,
            lambda: p.lambda,
            alpha: p.alpha,
        })
    }

    fn velocity(&self, v0: InitialVelocity) -> f64 {
        match v0 {
            InitialVelocity::Forward => self.c,
            InitialVelocity::Backward => -self.v,
        }
    }
}

/// First pair index `j` with `(2j-1)α` past the argument `u`.
fn pair_guard(u: f64, alpha: f64) -> usize {
    let j = ((u / alpha + 1.0) / 2.0).ceil();
    if j.is_finite() && j >= 1.0 {
        j as usize
    } else {
        1
    }
}

/// `T_k / λ = t P(a,λt) - (a/λ) P(a+1,λt)` with `a = kα`, i.e.
/// `∫_0^t P(a, λs) ds`, written as `(u - a) P(a,u)/λ + u^a e^{-u}/(λ Γ(a))`
/// once `P(a,u)` is small to avoid subtracting two nearly equal numbers.
fn integrated_cdf(a: f64, lambda: f64, t: f64) -> f64 {
    let u = lambda * t;
    let pa = gamma_pq(a, u).p;
    if pa > 0.5 {
        let pa1 = gamma_pq(a + 1.0, u).p;
        return t * pa - a / lambda * pa1;
    }
    let density = (a * u.ln() - u - ln_gamma(a)).exp();
    ((u - a) * pa + density) / lambda
}

/// `E[X_t | V_0]`.
pub fn mean_conditional(params: &SymmetricGammaParams, t: f64, v0: InitialVelocity, ctl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    ctl.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and > 0, got {t}"));
    }
    let SymmetricGammaParams { c, v, lambda, alpha } = *params;
    let guard = pair_guard(lambda * t, alpha);
    // Σ (-1)^k ∫_0^t P(kα,λs) ds, pair j = -I_{2j-1} + I_{2j}
    let (sum, _) = sum_series(ctl, guard, |j| {
        let k_odd = (2 * j - 1) as f64;
        integrated_cdf((k_odd + 1.0) * alpha, lambda, t) - integrated_cdf(k_odd * alpha, lambda, t)
    })?;
    Ok(params.velocity(v0) * t + (c + v) * v0.sign() * sum)
}

/// `E[(-1)^{N_s}] = 1 + 2 Σ_{k≥1} (-1)^k P(kα, λs)`.
pub fn parity_expectation(params: &SymmetricGammaParams, s: f64, ctl: &SeriesControl) -> Result<f64> {
    params.validate()?;
    ctl.validate()?;
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("s must be finite and >= 0, got {s}"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let u = params.lambda * s;
    let alpha = params.alpha;
    let guard = pair_guard(u, alpha);
    // pair j: -P((2j-1)α,u) + P(2jα,u)
    let (sum, _) = sum_series(ctl, guard, |j| {
        -shape_increment_bracket((2 * j - 1) as f64 * alpha, alpha, u)
    })?;
    Ok(1.0 + 2.0 * sum)
}

/// `E[(-1)^{N_s}]` for Erlang(`n`, `λ`) sojourns from the Poisson block sum
/// `1 - 2 e^{-λs} Σ_{k≥0} Σ_{j=2nk+n}^{2nk+2n-1} (λs)^j / j!`.
pub fn erlang_parity_expectation(n: u32, lambda: f64, s: f64) -> Result<f64> {
    if n < 1 {
        return domain("Erlang shape n must be >= 1");
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be finite and > 0, got {lambda}"));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return domain(format!("s must be finite and >= 0, got {s}"));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    let u = lambda * s;
    let n = n as u64;
    let poisson = |j: u64| ((j as f64) * u.ln() - u - ln_gamma(j as f64 + 1.0)).exp();
    let mut total = 0.0;
    for k in 0u64.. {
        let lo = 2 * n * k + n;
        let block: f64 = (lo..lo + n).map(poisson).sum();
        total += block;
        if lo as f64 > u && block < 1e-15 * total {
            break;
        }
        if lo > 1_000_000 {
            break;
        }
    }
    Ok(1.0 - 2.0 * total)
}

/// Closed-form `E[X_t | V_0]` for Erlang(`n`, `λ`) sojourns, `n ∈ {1,2,3,4}`.
/// `params.alpha` is ignored.
pub fn erlang_mean_closed_form(n: u32, params: &SymmetricGammaParams, t: f64, v0: InitialVelocity) -> Result<f64> {
    params.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and >= 0, got {t}"));
    }
    let SymmetricGammaParams { c, v, lambda, .. } = *params;
    let lt = lambda * t;
    let drift = (c - v) * t / 2.0;
    let sgn = v0.sign();
    let half = (c + v) / (2.0 * lambda);
    let oscillating = match n {
        1 => return Ok(drift + (c + v) / (4.0 * lambda) * sgn * (1.0 - (-2.0 * lt).exp())),
        2 => 1.0 - (-lt).exp() * lt.cos(),
        3 => {
            let r3 = 3f64.sqrt() / 2.0;
            (1.0 - (-2.0 * lt).exp()) / 6.0 + 4.0 / 3.0 * (1.0 - (-lt / 2.0).exp() * (r3 * lt).cos())
        }
        4 => {
            let r2 = std::f64::consts::FRAC_1_SQRT_2;
            (1.0 - (1.0 + r2) * (-lt * (1.0 - r2)).exp() * (r2 * lt).cos())
                + (1.0 - (1.0 - r2) * (-lt * (1.0 + r2)).exp() * (r2 * lt).cos())
        }
        other => return domain(format!("closed-form mean is available for n in 1..=4, got {other}")),
    };
    Ok(drift + half * sgn * oscillating)
}
