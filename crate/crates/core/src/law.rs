//! Exact conditional law of `(X_t, V_t)` given `X_0 = 0` and the initial
//! velocity.
//!
//! With `x̄ = (ct - x)/(c+v)` (total backward time) and `x* = (vt + x)/(c+v)`
//! (total forward time), the law for `V_0 = c` splits into
//!
//! - an atom at `x = ct` of mass `Q(α, λt)`,
//! - a forward density
//!   `f = e^{-μx̄}/(c+v) Σ_{k≥1} μ^{kβ} x̄^{kβ-1}/Γ(kβ) [P(kα,λx*) - P(kα+α,λx*)]`,
//! - a backward density
//!   `b = e^{-λx*}/(c+v) { λ^α x*^{α-1}/Γ(α) Q(β,μx̄)
//!        + Σ_{k≥1} λ^{(k+1)α} x*^{(k+1)α-1}/Γ((k+1)α) [P(kβ,μx̄) - P(kβ+β,μx̄)] }`.
//!
//! The law for `V_0 = -v` follows by mirroring the line: swap `c ↔ v`,
//! `(λ,α) ↔ (μ,β)`, `x ↔ -x`, and exchange the roles of `f` and `b`.
//!
//! Every power/gamma ratio is evaluated in log space and exponentiated once.

use crate::error::{domain, Error, Result};
use crate::series::{sum_series, SeriesControl};
use crate::specfun::{gamma_pq, ln_gamma, ln_gamma_kernel, shape_increment_bracket};

/// Points closer than `NEAR_BOUNDARY_BAND · (c+v) · t` to either endpoint of
/// the support are rejected by the pointwise density API.
pub const NEAR_BOUNDARY_BAND: f64 = 1e-12;

/// Velocities and gamma sojourn laws of the motion.
///
/// Forward runs last `Gamma(shape = alpha, rate = lambda)`, backward runs
/// `Gamma(shape = beta, rate = mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionParams {
    pub c: f64,
    pub v: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub mu: f64,
    pub beta: f64,
}

impl MotionParams {
    pub fn new(c: f64, v: f64, lambda: f64, alpha: f64, mu: f64, beta: f64) -> Result<Self> {
        let p = Self {
            c,
            v,
            lambda,
            alpha,
            mu,
            beta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Identical gamma law `(rate, shape)` in both directions.
    pub fn symmetric(c: f64, v: f64, rate: f64, shape: f64) -> Result<Self> {
        Self::new(c, v, rate, shape, rate, shape)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, val) in [
            ("c", self.c),
            ("v", self.v),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("mu", self.mu),
            ("beta", self.beta),
        ] {
            if !(val > 0.0) || !val.is_finite() {
                return domain(format!("{name} must be finite and > 0, got {val}"));
            }
        }
        Ok(())
    }

    /// Parameters of the mirrored motion `-X_t`.
    pub fn reflected(&self) -> Self {
        Self {
            c: self.v,
            v: self.c,
            lambda: self.mu,
            alpha: self.beta,
            mu: self.lambda,
            beta: self.alpha,
        }
    }

    pub fn speed_sum(&self) -> f64 {
        self.c + self.v
    }
}

/// Initial velocity `V_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialVelocity {
    /// `V_0 = c`.
    Forward,
    /// `V_0 = -v`.
    Backward,
}

impl InitialVelocity {
    /// `V_0` as a signed speed.
    pub fn velocity(self, params: &MotionParams) -> f64 {
        match self {
            InitialVelocity::Forward => params.c,
            InitialVelocity::Backward => -params.v,
        }
    }

    /// `sgn(V_0)`.
    pub fn sign(self) -> f64 {
        match self {
            InitialVelocity::Forward => 1.0,
            InitialVelocity::Backward => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            InitialVelocity::Forward => InitialVelocity::Backward,
            InitialVelocity::Backward => InitialVelocity::Forward,
        }
    }
}

impl std::str::FromStr for InitialVelocity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" | "c" | "+" => Ok(InitialVelocity::Forward),
            "backward" | "-v" | "-" => Ok(InitialVelocity::Backward),
            other => domain(format!("initial velocity must be forward or backward, got {other:?}")),
        }
    }
}

/// A point `(x, t)` strictly inside the support `(-vt, ct)`, with its time
/// coordinates `x̄` and `x*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub x: f64,
    pub t: f64,
    pub x_bar: f64,
    pub x_star: f64,
}

impl SpaceTimePoint {
    /// Fails outside `(-vt, ct)` and inside the near-boundary band.
    pub fn new(params: &MotionParams, x: f64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return domain(format!("t must be finite and > 0, got {t}"));
        }
        let lo = -params.v * t;
        let hi = params.c * t;
        if !(x > lo && x < hi) {
            return domain(format!("x = {x} outside the open support ({lo}, {hi}) at t = {t}"));
        }
        let band = NEAR_BOUNDARY_BAND * params.speed_sum() * t;
        for endpoint in [lo, hi] {
            if (x - endpoint).abs() < band {
                return Err(Error::NearBoundary { x, t, endpoint, band });
            }
        }
        let cv = params.speed_sum();
        Ok(Self {
            x,
            t,
            x_bar: (hi - x) / cv,
            x_star: (params.v * t + x) / cv,
        })
    }
}

/// One density component and the index of the last series term used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityComponent {
    pub value: f64,
    pub terms: usize,
}

/// Density components of the continuous part at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawPoint {
    /// `f`: density of `X_t` jointly with `V_t = c`.
    pub forward_density: f64,
    /// `b`: density of `X_t` jointly with `V_t = -v`.
    pub backward_density: f64,
    /// `p = f + b`.
    pub total_density: f64,
    pub truncation_index_f: usize,
    pub truncation_index_b: usize,
}

impl LawPoint {
    fn from_components(f: DensityComponent, b: DensityComponent) -> Self {
        Self {
            forward_density: f.value,
            backward_density: b.value,
            total_density: f.value + b.value,
            truncation_index_f: f.terms,
            truncation_index_b: b.terms,
        }
    }

    fn swapped(self) -> Self {
        Self {
            forward_density: self.backward_density,
            backward_density: self.forward_density,
            total_density: self.backward_density + self.forward_density,
            truncation_index_f: self.truncation_index_b,
            truncation_index_b: self.truncation_index_f,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and > 0, got {t}"));
    }
    Ok(())
}

/// First index past the peak of a gamma-kernel-times-bracket term sequence.
fn monotone_index(kernel_rate_time: f64, kernel_shape_step: f64, kernel_offset: f64, bracket_arg: f64, bracket_step: f64) -> usize {
    // kernel peaks where (k + offset)·step - 1 ≈ rate·time; bracket peaks where
    // k·step ≈ arg
    let k1 = (kernel_rate_time + 1.0) / kernel_shape_step - kernel_offset;
    let k2 = bracket_arg / bracket_step;
    let k = k1.max(k2).ceil();
    if k.is_finite() && k >= 1.0 {
        k as usize
    } else {
        1
    }
}

/// `f(x,t|c)` in terms of `x*` and `x̄` (both > 0), without support checks.
pub(crate) fn forward_component(p: &MotionParams, x_star: f64, x_bar: f64, ctl: &SeriesControl) -> Result<DensityComponent> {
    let cv = p.speed_sum();
    let mu_xbar = p.mu * x_bar;
    let lam_xstar = p.lambda * x_star;
    let guard = monotone_index(mu_xbar, p.beta, 0.0, lam_xstar, p.alpha);
    let (sum, terms) = sum_series(ctl, guard, |k| {
        let kf = k as f64;
        let bracket = shape_increment_bracket(kf * p.alpha, p.alpha, lam_xstar);
        if bracket <= 0.0 {
            return 0.0;
        }
        (ln_gamma_kernel(p.mu, kf * p.beta, x_bar) - mu_xbar).exp() * bracket
    })?;
    Ok(DensityComponent {
        value: (sum / cv).max(0.0),
        terms,
    })
}

/// `b(x,t|c)` in terms of `x*` and `x̄` (both > 0), without support checks.
pub(crate) fn backward_component(p: &MotionParams, x_star: f64, x_bar: f64, ctl: &SeriesControl) -> Result<DensityComponent> {
    let cv = p.speed_sum();
    let mu_xbar = p.mu * x_bar;
    let lam_xstar = p.lambda * x_star;
    let survival = gamma_pq(p.beta, mu_xbar).q;
    let lead = if survival > 0.0 {
        (ln_gamma_kernel(p.lambda, p.alpha, x_star) - lam_xstar).exp() * survival
    } else {
        0.0
    };
    let guard = monotone_index(lam_xstar, p.alpha, 1.0, mu_xbar, p.beta);
    let (sum, terms) = sum_series(ctl, guard, |k| {
        let kf = k as f64;
        let bracket = shape_increment_bracket(kf * p.beta, p.beta, mu_xbar);
        if bracket <= 0.0 {
            return 0.0;
        }
        (ln_gamma_kernel(p.lambda, (kf + 1.0) * p.alpha, x_star) - lam_xstar).exp() * bracket
    })?;
    Ok(DensityComponent {
        value: ((lead + sum) / cv).max(0.0),
        terms,
    })
}

/// Full law point from the time coordinates, for either initial velocity.
pub(crate) fn law_at(p: &MotionParams, x_star: f64, x_bar: f64, v0: InitialVelocity, ctl: &SeriesControl) -> Result<LawPoint> {
    match v0 {
        InitialVelocity::Forward => {
            let f = forward_component(p, x_star, x_bar, ctl)?;
            let b = backward_component(p, x_star, x_bar, ctl)?;
            Ok(LawPoint::from_components(f, b))
        }
        InitialVelocity::Backward => {
            // in the mirrored motion the forward time is the original x̄
            let m = p.reflected();
            let f = forward_component(&m, x_bar, x_star, ctl)?;
            let b = backward_component(&m, x_bar, x_star, ctl)?;
            Ok(LawPoint::from_components(f, b).swapped())
        }
    }
}

/// Mass of the atom `P{X_t = V_0 t, V_t = V_0 | V_0}`: the survival function
/// of the first sojourn at `t`.
pub fn atom_probability(params: &MotionParams, t: f64, v0: InitialVelocity) -> Result<f64> {
    params.validate()?;
    check_time(t)?;
    Ok(match v0 {
        InitialVelocity::Forward => gamma_pq(params.alpha, params.lambda * t).q,
        InitialVelocity::Backward => gamma_pq(params.beta, params.mu * t).q,
    })
}

/// `f(x,t|c)` at a validated point.
pub fn forward_density(params: &MotionParams, point: &SpaceTimePoint, ctl: &SeriesControl) -> Result<DensityComponent> {
    params.validate()?;
    ctl.validate()?;
    forward_component(params, point.x_star, point.x_bar, ctl)
}

/// `b(x,t|c)` at a validated point.
pub fn backward_density(params: &MotionParams, point: &SpaceTimePoint, ctl: &SeriesControl) -> Result<DensityComponent> {
    params.validate()?;
    ctl.validate()?;
    backward_component(params, point.x_star, point.x_bar, ctl)
}

/// `(f, b, p)` at `(x, t)` given `V_0`.
pub fn density(params: &MotionParams, x: f64, t: f64, v0: InitialVelocity, ctl: &SeriesControl) -> Result<LawPoint> {
    params.validate()?;
    ctl.validate()?;
    let point = SpaceTimePoint::new(params, x, t)?;
    law_at(params, point.x_star, point.x_bar, v0, ctl)
}

/// [`density`] at each of `xs`, evaluated in parallel; output order follows `xs`.
pub fn density_grid(params: &MotionParams, xs: &[f64], t: f64, v0: InitialVelocity, ctl: &SeriesControl) -> Result<Vec<LawPoint>> {
    use rayon::prelude::*;
    xs.par_iter().map(|&x| density(params, x, t, v0, ctl)).collect()
}

/// Endpoint limits of the densities for `V_0 = c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCase {
    /// `f(x,t|c)` as `x ↓ -vt`.
    ForwardAtMinusVt,
    /// `f(x,t|c)` as `x ↑ ct`.
    ForwardAtCt,
    /// `b(x,t|c)` as `x ↑ ct`.
    BackwardAtCt,
    /// `b(x,t|c)` as `x ↓ -vt`.
    BackwardAtMinusVt,
}

impl BoundaryCase {
    pub const ALL: [BoundaryCase; 4] = [
        BoundaryCase::ForwardAtMinusVt,
        BoundaryCase::ForwardAtCt,
        BoundaryCase::BackwardAtCt,
        BoundaryCase::BackwardAtMinusVt,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BoundaryCase::ForwardAtMinusVt => "f_at_minus_vt",
            BoundaryCase::ForwardAtCt => "f_at_ct",
            BoundaryCase::BackwardAtCt => "b_at_ct",
            BoundaryCase::BackwardAtMinusVt => "b_at_minus_vt",
        }
    }

    /// Whether the limit is taken at the right endpoint `ct`.
    pub fn at_right_end(self) -> bool {
        matches!(self, BoundaryCase::ForwardAtCt | BoundaryCase::BackwardAtCt)
    }
}

/// A limit value, with analytic divergence kept distinct from any
/// floating-point overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v:e}"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// Closed-form endpoint limits of `f(·,t|c)` and `b(·,t|c)`.
///
/// Shapes are compared with 1 exactly: the finite middle regime exists only
/// for a shape of exactly one.
pub fn boundary_limit(params: &MotionParams, which: BoundaryCase, t: f64) -> Result<ExtendedReal> {
    params.validate()?;
    check_time(t)?;
    let p = params;
    let cv = p.speed_sum();
    let lt = p.lambda * t;
    Ok(match which {
        BoundaryCase::ForwardAtMinusVt => ExtendedReal::Finite(0.0),
        BoundaryCase::ForwardAtCt => {
            if p.beta < 1.0 {
                ExtendedReal::PosInfinity
            } else if p.beta == 1.0 {
                let bracket = shape_increment_bracket(p.alpha, p.alpha, lt);
                ExtendedReal::Finite(p.mu / cv * bracket)
            } else {
                ExtendedReal::Finite(0.0)
            }
        }
        BoundaryCase::BackwardAtCt => {
            ExtendedReal::Finite((ln_gamma_kernel(p.lambda, p.alpha, t) - lt).exp() / cv)
        }
        BoundaryCase::BackwardAtMinusVt => {
            if p.alpha < 1.0 {
                ExtendedReal::PosInfinity
            } else if p.alpha == 1.0 {
                let survival = gamma_pq(p.beta, p.mu * t).q;
                // Γ(β,μt)/Γ(β) = Q(β,μt); Γ(α) = 1 here
                ExtendedReal::Finite(p.lambda * survival / (cv * ln_gamma(p.alpha).exp()))
            } else {
                ExtendedReal::Finite(0.0)
            }
        }
    })
}
