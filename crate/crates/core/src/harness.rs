//! Analytic-versus-empirical validation.
//!
//! Integrals of the density are taken in the forward-time coordinate
//! `x* = (vt + x)/(c+v) ∈ [0, t]`, where `dx = (c+v) dx*`. Tanh-sinh nodes
//! carry their distance to each end of the span, which gives `x*` and
//! `x̄ = t - x*` without cancellation right up to the endpoints, where the
//! densities may have integrable power-law singularities.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::law::{atom_probability, boundary_limit, forward_component, law_at, BoundaryCase, ExtendedReal, InitialVelocity, MotionParams};
use crate::moments::{mean_conditional, SymmetricGammaParams};
use crate::quadrature::TanhSinh;
use crate::series::SeriesControl;
use crate::simulate::{ensemble, EmpiricalLaw};

/// Geometric sequence of relative endpoint offsets used by the limit probes.
pub const LIMIT_EPSILONS: [f64; 3] = [1e-3, 1e-4, 1e-5];

pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const ATOM_Z_MAX: f64 = 4.0;
pub const MEAN_Z_MAX: f64 = 4.0;
pub const BIN_SIGMAS: f64 = 3.0;
pub const BIN_COVERAGE_MIN: f64 = 0.95;
pub const VELOCITY_Z_MAX: f64 = 3.0;
pub const LIMIT_REL_TOL: f64 = 1e-3;

/// Which part of the continuous law to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Forward,
    Backward,
    Total,
}

/// `∫ (component of the law) dx` over the part of the support whose
/// forward-time coordinate runs from `s_lo` to `s_hi` (`0 <= s_lo < s_hi <= t`).
#[allow(clippy::too_many_arguments)]
pub fn integrate_forward_time_span(
    params: &MotionParams,
    t: f64,
    v0: InitialVelocity,
    component: Component,
    s_lo: f64,
    s_hi: f64,
    quad: &TanhSinh,
    ctl: &SeriesControl,
) -> Result<f64> {
    let cv = params.speed_sum();
    let right_gap = (t - s_hi).max(0.0);
    let est = quad.integrate(s_lo, s_hi, |node| {
        let x_star = s_lo + node.from_left;
        let x_bar = right_gap + node.from_right;
        let lp = law_at(params, x_star, x_bar, v0, ctl)?;
        let value = match component {
            Component::Forward => lp.forward_density,
            Component::Backward => lp.backward_density,
            Component::Total => lp.total_density,
        };
        Ok(value * cv)
    })?;
    Ok(est.value)
}

/// `∫_{-vt}^{ct} p(x,t|v0) dx`, the mass of the continuous part of the law.
pub fn integrate_density(params: &MotionParams, t: f64, v0: InitialVelocity, tol: f64) -> Result<f64> {
    params.validate()?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be > 0, got {t}")));
    }
    let quad = TanhSinh::with_tol(tol);
    integrate_forward_time_span(params, t, v0, Component::Total, 0.0, t, &quad, &SeriesControl::default())
}

/// Analytic mass of each of `n_bins` equal-width bins of `(-vt, ct)`.
pub fn bin_masses(params: &MotionParams, t: f64, v0: InitialVelocity, n_bins: usize, tol: f64) -> Result<Vec<f64>> {
    bin_masses_with(params, t, v0, n_bins, tol, &SeriesControl::default())
}

fn bin_masses_with(params: &MotionParams, t: f64, v0: InitialVelocity, n_bins: usize, tol: f64, ctl: &SeriesControl) -> Result<Vec<f64>> {
    let quad = TanhSinh::with_tol(tol);
    let n = n_bins as f64;
    (0..n_bins)
        .into_par_iter()
        .map(|i| {
            // the map x -> x* is affine, so equal-width bins in x are equal in x*
            let s_lo = t * i as f64 / n;
            let s_hi = if i + 1 == n_bins { t } else { t * (i + 1) as f64 / n };
            integrate_forward_time_span(params, t, v0, Component::Total, s_lo, s_hi, &quad, ctl)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        })
    }
}

/// One pass/fail line of the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub observed: String,
    pub expected: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, observed: impl Into<String>, expected: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            observed: observed.into(),
            expected: expected.into(),
        }
    }

    fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Skipped,
            observed: why.into(),
            expected: String::new(),
        }
    }

    fn errored(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Fail,
            observed: format!("error: {err}"),
            expected: String::new(),
        }
    }
}

/// Regime of an endpoint limit and how it was probed.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    pub case: BoundaryCase,
    pub limit: ExtendedReal,
    /// Density at `x = ct(1-ε)` or `x = -vt(1-ε)` for each of [`LIMIT_EPSILONS`].
    pub values: Vec<f64>,
}

impl LimitProbe {
    /// Evaluates the density component named by `case` along the ε-sequence.
    pub fn run(params: &MotionParams, case: BoundaryCase, t: f64, ctl: &SeriesControl) -> Result<Self> {
        let limit = boundary_limit(params, case, t)?;
        let cv = params.speed_sum();
        let values = LIMIT_EPSILONS
            .iter()
            .map(|&eps| {
                // distance from the endpoint, in time units
                let gap = if case.at_right_end() { params.c * t * eps } else { params.v * t * eps } / cv;
                let (x_star, x_bar) = if case.at_right_end() { (t - gap, gap) } else { (gap, t - gap) };
                match case {
                    BoundaryCase::ForwardAtCt | BoundaryCase::ForwardAtMinusVt => {
                        Ok(forward_component(params, x_star, x_bar, ctl)?.value)
                    }
                    _ => Ok(law_at(params, x_star, x_bar, InitialVelocity::Forward, ctl)?.backward_density),
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { case, limit, values })
    }

    /// Growth factor from the largest to the smallest ε.
    pub fn overall_ratio(&self) -> f64 {
        self.values[self.values.len() - 1] / self.values[0]
    }

    /// Ratios between consecutive ε (one per decade).
    pub fn decade_ratios(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] / w[0]).collect()
    }

    /// Regime test: a finite non-zero limit must be matched at the smallest ε
    /// within [`LIMIT_REL_TOL`]; a divergent one must grow strictly and at least
    /// double over the sequence; a zero limit must decrease strictly and at
    /// least halve.
    pub fn passes(&self) -> bool {
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        match self.limit {
            ExtendedReal::PosInfinity => increasing && self.overall_ratio() >= 2.0,
            ExtendedReal::Finite(0.0) => decreasing && self.overall_ratio() <= 0.5,
            ExtendedReal::Finite(l) => (self.values[self.values.len() - 1] / l - 1.0).abs() <= LIMIT_REL_TOL,
        }
    }

    fn to_check(&self) -> Check {
        let observed = self.values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(";");
        Check::new(format!("limit.{}", self.case.label()), self.passes(), observed, self.limit.to_string())
    }
}

/// Knobs for [`validate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub n_samples: usize,
    pub n_bins: usize,
    pub seed: u64,
    pub quad_tol: f64,
    pub ctl: SeriesControl,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            n_bins: 100,
            seed: 0x5eed,
            quad_tol: 1e-10,
            ctl: SeriesControl::default(),
        }
    }
}

/// Outcome of [`validate`]. Simulation-based quantities are `None` when no
/// paths were simulated (or the comparison does not apply).
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `|1 - atom - ∫p|`.
    pub normalization_defect: f64,
    /// `Σ |empirical bin mass - analytic bin mass|`.
    pub l1_histogram_distance: Option<f64>,
    /// Fraction of bins whose count is within 3 binomial standard errors.
    pub bins_within_3sigma: Option<f64>,
    pub atom_z_score: Option<f64>,
    /// Sample mean vs the analytic mean, in standard errors (symmetric laws only).
    pub mean_z_score: Option<f64>,
    pub limit_checks: Vec<LimitProbe>,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    /// `key=value` lines.
    pub fn to_key_value(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "skipped".to_string(), |x| format!("{x:e}"));
        let mut out = String::new();
        out.push_str(&format!("normalization_defect={:e}\n", self.normalization_defect));
        out.push_str(&format!("l1_histogram_distance={}\n", opt(self.l1_histogram_distance)));
        out.push_str(&format!("bins_within_3sigma={}\n", opt(self.bins_within_3sigma)));
        out.push_str(&format!("atom_z_score={}\n", opt(self.atom_z_score)));
        out.push_str(&format!("mean_z_score={}\n", opt(self.mean_z_score)));
        for c in &self.checks {
            out.push_str(&format!("check.{}={}\n", c.name, c.status));
            out.push_str(&format!("check.{}.observed={}\n", c.name, c.observed));
            if !c.expected.is_empty() {
                out.push_str(&format!("check.{}.expected={}\n", c.name, c.expected));
            }
        }
        out.push_str(&format!("overall={}\n", if self.passed() { "pass" } else { "fail" }));
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "[{:>7}] {:<28} observed {}", c.status, c.name, c.observed)?;
            if !c.expected.is_empty() {
                write!(f, " (expected {})", c.expected)?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "fail" })
    }
}

/// [`validate_with`] using default bins, quadrature tolerance and series control.
pub fn validate(params: &MotionParams, t: f64, v0: InitialVelocity, n_samples: usize, seed: u64) -> Result<ValidationReport> {
    validate_with(
        params,
        t,
        v0,
        &ValidationConfig {
            n_samples,
            seed,
            ..ValidationConfig::default()
        },
    )
}

struct SimulationChecks {
    l1: Option<f64>,
    coverage: Option<f64>,
    atom_z: Option<f64>,
    mean_z: Option<f64>,
    checks: Vec<Check>,
}

fn binomial_z(count: f64, n: f64, q: f64) -> f64 {
    let sd = (n * q * (1.0 - q)).sqrt();
    if sd == 0.0 {
        if (count - n * q).abs() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (count - n * q) / sd
    }
}

fn simulation_checks(params: &MotionParams, t: f64, v0: InitialVelocity, atom: f64, cfg: &ValidationConfig) -> SimulationChecks {
    let names = ["atom_frequency", "histogram_coverage", "velocity_parity", "mean"];
    if cfg.n_samples == 0 {
        return SimulationChecks {
            l1: None,
            coverage: None,
            atom_z: None,
            mean_z: None,
            checks: names.iter().map(|n| Check::skipped(*n, "n_samples=0")).collect(),
        };
    }
    let mut checks = Vec::new();
    let law: EmpiricalLaw = match ensemble(params, t, v0, cfg.n_samples, cfg.n_bins, cfg.seed) {
        Ok(l) => l,
        Err(e) => {
            return SimulationChecks {
                l1: None,
                coverage: None,
                atom_z: None,
                mean_z: None,
                checks: names.iter().map(|n| Check::errored(*n, &e)).collect(),
            }
        }
    };
    let n = law.sample_count as f64;

    let atom_z = binomial_z(law.atom_count as f64, n, atom);
    checks.push(Check::new(
        "atom_frequency",
        atom_z.abs() <= ATOM_Z_MAX,
        format!("{:e} (z={atom_z:.3})", law.atom_frequency),
        format!("{atom:e}, |z|<={ATOM_Z_MAX}"),
    ));

    let (l1, coverage) = match bin_masses_with(params, t, v0, cfg.n_bins, cfg.quad_tol, &cfg.ctl) {
        Ok(masses) => {
            let l1: f64 = masses.iter().zip(&law.bin_masses).map(|(a, e)| (a - e).abs()).sum();
            let within = masses
                .iter()
                .zip(&law.bin_counts)
                .filter(|(m, &c)| binomial_z(c as f64, n, **m).abs() <= BIN_SIGMAS)
                .count();
            let coverage = within as f64 / masses.len() as f64;
            checks.push(Check::new(
                "histogram_coverage",
                coverage >= BIN_COVERAGE_MIN,
                format!("{coverage:.4} of bins within {BIN_SIGMAS} sigma, L1={l1:e}"),
                format!(">={BIN_COVERAGE_MIN}"),
            ));
            (Some(l1), Some(coverage))
        }
        Err(e) => {
            checks.push(Check::errored("histogram_coverage", &e));
            (None, None)
        }
    };

    // P{V_t = c}: the atom counts only when starting forward
    let quad = TanhSinh::with_tol(cfg.quad_tol);
    match integrate_forward_time_span(params, t, v0, Component::Forward, 0.0, t, &quad, &cfg.ctl) {
        Ok(fmass) => {
            let q = fmass + if v0 == InitialVelocity::Forward { atom } else { 0.0 };
            let z = binomial_z(law.forward_count as f64, n, q);
            checks.push(Check::new(
                "velocity_parity",
                z.abs() <= VELOCITY_Z_MAX,
                format!("{:e} (z={z:.3})", law.forward_frequency()),
                format!("{q:e}, |z|<={VELOCITY_Z_MAX}"),
            ));
        }
        Err(e) => checks.push(Check::errored("velocity_parity", &e)),
    }

    let mean_z = match SymmetricGammaParams::from_motion(params) {
        None => {
            checks.push(Check::skipped("mean", "asymmetric sojourn laws"));
            None
        }
        Some(sym) => match mean_conditional(&sym, t, v0, &cfg.ctl) {
            Ok(m) => {
                let se = law.mean_standard_error();
                let z = if se > 0.0 { (law.mean_position - m) / se } else { 0.0 };
                checks.push(Check::new(
                    "mean",
                    z.abs() <= MEAN_Z_MAX,
                    format!("{:e} (z={z:.3})", law.mean_position),
                    format!("{m:e}, |z|<={MEAN_Z_MAX}"),
                ));
                Some(z)
            }
            Err(e) => {
                checks.push(Check::errored("mean", &e));
                None
            }
        },
    };

    SimulationChecks {
        l1,
        coverage,
        atom_z: Some(atom_z),
        mean_z,
        checks,
    }
}

/// Full analytic-versus-simulation report. Failures of individual
/// computations become failed checks; only invalid inputs abort.
pub fn validate_with(params: &MotionParams, t: f64, v0: InitialVelocity, cfg: &ValidationConfig) -> Result<ValidationReport> {
    params.validate()?;
    cfg.ctl.validate()?;
    let atom = atom_probability(params, t, v0)?;

    let (analytic, sim) = rayon::join(
        || {
            let mut checks = Vec::new();
            let quad = TanhSinh::with_tol(cfg.quad_tol);
            let defect = match integrate_forward_time_span(params, t, v0, Component::Total, 0.0, t, &quad, &cfg.ctl) {
                Ok(mass) => {
                    let d = (1.0 - atom - mass).abs();
                    checks.push(Check::new(
                        "normalization",
                        d <= NORMALIZATION_TOL,
                        format!("{d:e}"),
                        format!("<={NORMALIZATION_TOL:e}"),
                    ));
                    d
                }
                Err(e) => {
                    checks.push(Check::errored("normalization", &e));
                    f64::NAN
                }
            };
            let mut probes = Vec::new();
            for case in BoundaryCase::ALL {
                match LimitProbe::run(params, case, t, &cfg.ctl) {
                    Ok(p) => {
                        checks.push(p.to_check());
                        probes.push(p);
                    }
                    Err(e) => checks.push(Check::errored(format!("limit.{}", case.label()), &e)),
                }
            }
            (defect, probes, checks)
        },
        || simulation_checks(params, t, v0, atom, cfg),
    );

    let (normalization_defect, limit_checks, mut checks) = analytic;
    checks.extend(sim.checks);
    Ok(ValidationReport {
        normalization_defect,
        l1_histogram_distance: sim.l1,
        bins_within_3sigma: sim.coverage,
        atom_z_score: sim.atom_z,
        mean_z_score: sim.mean_z,
        limit_checks,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(alpha: f64, beta: f64) -> MotionParams {
        MotionParams::new(1.0, 1.0, 1.0, alpha, 1.0, beta).unwrap()
    }

    #[test]
    fn exponential_mass_is_one_minus_atom() {
        let m = integrate_density(&unit(1.0, 1.0), 1.0, InitialVelocity::Forward, 1e-12).unwrap();
        assert!((m - (1.0 - (-1.0f64).exp())).abs() < 1e-8);
    }

    #[test]
    fn singular_endpoints_still_integrate() {
        let p = unit(0.5, 0.5);
        let m = integrate_density(&p, 1.0, InitialVelocity::Forward, 1e-10).unwrap();
        let atom = atom_probability(&p, 1.0, InitialVelocity::Forward).unwrap();
        assert!((m - (1.0 - atom)).abs() < 1e-6);
    }

    #[test]
    fn bin_masses_sum_to_continuous_mass() {
        let p = unit(1.5, 0.5);
        let masses = bin_masses(&p, 2.0, InitialVelocity::Backward, 17, 1e-12).unwrap();
        let total = integrate_density(&p, 2.0, InitialVelocity::Backward, 1e-12).unwrap();
        assert!((masses.iter().sum::<f64>() - total).abs() < 1e-9);
        assert!(masses.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn zero_samples_skip_simulation_checks() {
        let r = validate(&unit(1.0, 1.0), 1.0, InitialVelocity::Forward, 0, 1).unwrap();
        assert!(r.l1_histogram_distance.is_none() && r.mean_z_score.is_none());
        let skipped = r.checks.iter().filter(|c| c.status == CheckStatus::Skipped).count();
        assert_eq!(skipped, 4);
        assert!(r.passed(), "{r}");
        assert!(r.to_key_value().contains("mean_z_score=skipped"));
    }

    #[test]
    fn divergent_probe_flags_growth() {
        let probe = LimitProbe::run(&unit(1.0, 0.5), BoundaryCase::ForwardAtCt, 1.0, &SeriesControl::default()).unwrap();
        assert!(probe.limit.is_infinite());
        assert!(probe.passes(), "{probe:?}");
        assert!(probe.decade_ratios().iter().all(|&r| r > 3.0));
    }
}
