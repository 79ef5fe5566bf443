//! Python bindings: `import gamma_telegraph`.
//!
//! Domain errors raise `DomainError` (a `ValueError`); series or quadrature
//! failures raise `ConvergenceError` (an `ArithmeticError`). Ensemble and
//! validation runs release the GIL.

use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use telegraph_core as core;
use telegraph_core::{BoundaryCase, ExtendedReal, InitialVelocity, SeriesControl, SymmetricGammaParams};

create_exception!(gamma_telegraph, DomainError, PyValueError, "Argument outside the domain of the law.");
create_exception!(
    gamma_telegraph,
    ConvergenceError,
    PyArithmeticError,
    "A series or quadrature did not reach its tolerance."
);

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Domain(_) | core::Error::NearBoundary { .. } => DomainError::new_err(e.to_string()),
        core::Error::Convergence { .. } | core::Error::Quadrature { .. } => ConvergenceError::new_err(e.to_string()),
    }
}

fn parse_v0(s: &str) -> PyResult<InitialVelocity> {
    s.parse().map_err(to_py)
}

fn parse_case(s: &str) -> PyResult<BoundaryCase> {
    BoundaryCase::ALL
        .into_iter()
        .find(|c| c.label() == s)
        .ok_or_else(|| DomainError::new_err(format!("unknown boundary case {s:?}; expected one of f_at_minus_vt, f_at_ct, b_at_ct, b_at_minus_vt")))
}

fn control(rel_tol: f64) -> PyResult<SeriesControl> {
    let d = SeriesControl::default();
    SeriesControl::new(rel_tol, d.consecutive_small, d.max_terms).map_err(to_py)
}

/// Speeds `c`, `v` and gamma sojourn laws `(lambda_, alpha)` forward,
/// `(mu, beta)` backward. `mu` and `beta` default to the forward values.
#[pyclass(frozen, skip_from_py_object, name = "MotionParams", module = "gamma_telegraph")]
#[derive(Clone, Copy)]
struct PyMotionParams {
    inner: core::MotionParams,
}

#[pymethods]
impl PyMotionParams {
    #[new]
    #[pyo3(signature = (c=1.0, v=1.0, lambda_=1.0, alpha=1.0, mu=None, beta=None))]
    fn new(c: f64, v: f64, lambda_: f64, alpha: f64, mu: Option<f64>, beta: Option<f64>) -> PyResult<Self> {
        let inner = core::MotionParams::new(c, v, lambda_, alpha, mu.unwrap_or(lambda_), beta.unwrap_or(alpha)).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }
    #[getter]
    fn v(&self) -> f64 {
        self.inner.v
    }
    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.lambda
    }
    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    /// Parameters of the mirrored motion `-X_t`.
    fn reflected(&self) -> Self {
        Self {
            inner: self.inner.reflected(),
        }
    }

    fn is_symmetric(&self) -> bool {
        SymmetricGammaParams::from_motion(&self.inner).is_some()
    }

    fn __repr__(&self) -> String {
        let p = self.inner;
        format!(
            "MotionParams(c={}, v={}, lambda_={}, alpha={}, mu={}, beta={})",
            p.c, p.v, p.lambda, p.alpha, p.mu, p.beta
        )
    }
}

impl PyMotionParams {
    fn symmetric(&self) -> PyResult<SymmetricGammaParams> {
        SymmetricGammaParams::from_motion(&self.inner)
            .ok_or_else(|| DomainError::new_err("the mean needs identically distributed sojourns: lambda_ == mu and alpha == beta"))
    }
}

/// `(f, b, p)` at one point with the series truncation indices.
#[pyclass(frozen, get_all, name = "LawPoint", module = "gamma_telegraph")]
struct PyLawPoint {
    forward_density: f64,
    backward_density: f64,
    total_density: f64,
    truncation_index_f: usize,
    truncation_index_b: usize,
}

impl From<core::LawPoint> for PyLawPoint {
    fn from(lp: core::LawPoint) -> Self {
        Self {
            forward_density: lp.forward_density,
            backward_density: lp.backward_density,
            total_density: lp.total_density,
            truncation_index_f: lp.truncation_index_f,
            truncation_index_b: lp.truncation_index_b,
        }
    }
}

#[pymethods]
impl PyLawPoint {
    fn __repr__(&self) -> String {
        format!(
            "LawPoint(f={}, b={}, p={}, terms=({}, {}))",
            self.forward_density, self.backward_density, self.total_density, self.truncation_index_f, self.truncation_index_b
        )
    }
}

/// Endpoint statistics of a simulated ensemble.
#[pyclass(frozen, get_all, name = "EmpiricalLaw", module = "gamma_telegraph")]
struct PyEmpiricalLaw {
    t: f64,
    atom_frequency: f64,
    bin_edges: Vec<f64>,
    bin_masses: Vec<f64>,
    bin_counts: Vec<u64>,
    atom_count: u64,
    sample_count: u64,
    forward_count: u64,
    mean_position: f64,
    position_variance: f64,
    bin_centers: Vec<f64>,
    density_estimates: Vec<f64>,
    mean_standard_error: f64,
}

impl From<core::EmpiricalLaw> for PyEmpiricalLaw {
    fn from(e: core::EmpiricalLaw) -> Self {
        Self {
            bin_centers: e.bin_centers(),
            density_estimates: e.density_estimates(),
            mean_standard_error: e.mean_standard_error(),
            t: e.t,
            atom_frequency: e.atom_frequency,
            bin_edges: e.bin_edges,
            bin_masses: e.bin_masses,
            bin_counts: e.bin_counts,
            atom_count: e.atom_count,
            sample_count: e.sample_count,
            forward_count: e.forward_count,
            mean_position: e.mean_position,
            position_variance: e.position_variance,
        }
    }
}

/// Outcome of `validate`. `checks` holds `(name, status, observed, expected)`.
#[pyclass(frozen, get_all, name = "ValidationReport", module = "gamma_telegraph")]
struct PyValidationReport {
    passed: bool,
    normalization_defect: f64,
    l1_histogram_distance: Option<f64>,
    bins_within_3sigma: Option<f64>,
    atom_z_score: Option<f64>,
    mean_z_score: Option<f64>,
    checks: Vec<(String, String, String, String)>,
    key_value: String,
}

#[pymethods]
impl PyValidationReport {
    fn __str__(&self) -> String {
        self.key_value.clone()
    }
}

impl From<core::ValidationReport> for PyValidationReport {
    fn from(r: core::ValidationReport) -> Self {
        Self {
            passed: r.passed(),
            key_value: r.to_key_value(),
            normalization_defect: r.normalization_defect,
            l1_histogram_distance: r.l1_histogram_distance,
            bins_within_3sigma: r.bins_within_3sigma,
            atom_z_score: r.atom_z_score,
            mean_z_score: r.mean_z_score,
            checks: r
                .checks
                .into_iter()
                .map(|c| (c.name, c.status.to_string(), c.observed, c.expected))
                .collect(),
        }
    }
}

#[pyfunction]
fn log_gamma(a: f64) -> PyResult<f64> {
    core::log_gamma(a).map_err(to_py)
}

#[pyfunction]
fn reg_lower_gamma(a: f64, u: f64) -> PyResult<f64> {
    core::reg_lower_gamma(a, u).map_err(to_py)
}

#[pyfunction]
fn reg_upper_gamma(a: f64, u: f64) -> PyResult<f64> {
    core::reg_upper_gamma(a, u).map_err(to_py)
}

#[pyfunction]
fn upper_gamma(a: f64, u: f64) -> PyResult<f64> {
    core::upper_gamma(a, u).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, t, v0="forward"))]
fn atom_probability(params: &PyMotionParams, t: f64, v0: &str) -> PyResult<f64> {
    core::atom_probability(&params.inner, t, parse_v0(v0)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, x, t, v0="forward", rel_tol=1e-12))]
fn density(params: &PyMotionParams, x: f64, t: f64, v0: &str, rel_tol: f64) -> PyResult<PyLawPoint> {
    core::density(&params.inner, x, t, parse_v0(v0)?, &control(rel_tol)?)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, xs, t, v0="forward", rel_tol=1e-12))]
fn density_grid(py: Python<'_>, params: &PyMotionParams, xs: Vec<f64>, t: f64, v0: &str, rel_tol: f64) -> PyResult<Vec<PyLawPoint>> {
    let (p, v0, ctl) = (params.inner, parse_v0(v0)?, control(rel_tol)?);
    let points = py.detach(|| core::density_grid(&p, &xs, t, v0, &ctl)).map_err(to_py)?;
    Ok(points.into_iter().map(Into::into).collect())
}

/// Endpoint limit for `V_0 = c`; `math.inf` marks an analytic divergence.
#[pyfunction]
fn boundary_limit(params: &PyMotionParams, which: &str, t: f64) -> PyResult<f64> {
    match core::boundary_limit(&params.inner, parse_case(which)?, t).map_err(to_py)? {
        ExtendedReal::Finite(x) => Ok(x),
        ExtendedReal::PosInfinity => Ok(f64::INFINITY),
    }
}

#[pyfunction]
#[pyo3(signature = (params, t, v0="forward", tol=1e-10))]
fn integrate_density(params: &PyMotionParams, t: f64, v0: &str, tol: f64) -> PyResult<f64> {
    core::integrate_density(&params.inner, t, parse_v0(v0)?, tol).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, t, v0="forward", rel_tol=1e-12))]
fn mean_conditional(params: &PyMotionParams, t: f64, v0: &str, rel_tol: f64) -> PyResult<f64> {
    core::mean_conditional(&params.symmetric()?, t, parse_v0(v0)?, &control(rel_tol)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, s, rel_tol=1e-12))]
fn parity_expectation(params: &PyMotionParams, s: f64, rel_tol: f64) -> PyResult<f64> {
    core::parity_expectation(&params.symmetric()?, s, &control(rel_tol)?).map_err(to_py)
}

#[pyfunction]
fn erlang_parity_expectation(n: u32, lambda_: f64, s: f64) -> PyResult<f64> {
    core::erlang_parity_expectation(n, lambda_, s).map_err(to_py)
}

/// Closed-form mean for Erlang(`n`) sojourns; the shape of `params` is ignored.
#[pyfunction]
#[pyo3(signature = (n, params, t, v0="forward"))]
fn erlang_mean_closed_form(n: u32, params: &PyMotionParams, t: f64, v0: &str) -> PyResult<f64> {
    let p = params.inner;
    if p.lambda != p.mu {
        return Err(DomainError::new_err("the closed-form mean needs lambda_ == mu"));
    }
    let sym = SymmetricGammaParams::new(p.c, p.v, p.lambda, n.max(1) as f64).map_err(to_py)?;
    core::erlang_mean_closed_form(n, &sym, t, parse_v0(v0)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, t, v0="forward", n_samples=100_000, n_bins=100, seed=0))]
fn ensemble(py: Python<'_>, params: &PyMotionParams, t: f64, v0: &str, n_samples: usize, n_bins: usize, seed: u64) -> PyResult<PyEmpiricalLaw> {
    let (p, v0) = (params.inner, parse_v0(v0)?);
    py.detach(|| core::ensemble(&p, t, v0, n_samples, n_bins, seed))
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (params, t, v0="forward", n_samples=1_000_000, seed=0x5eed, n_bins=100, rel_tol=1e-12))]
#[allow(clippy::too_many_arguments)]
fn validate(
    py: Python<'_>,
    params: &PyMotionParams,
    t: f64,
    v0: &str,
    n_samples: usize,
    seed: u64,
    n_bins: usize,
    rel_tol: f64,
) -> PyResult<PyValidationReport> {
    let (p, v0) = (params.inner, parse_v0(v0)?);
    let cfg = core::ValidationConfig {
        n_samples,
        n_bins,
        seed,
        ctl: control(rel_tol)?,
        ..core::ValidationConfig::default()
    };
    py.detach(|| core::validate_with(&p, t, v0, &cfg))
        .map(Into::into)
        .map_err(to_py)
}

/// Telegraph motion with gamma-distributed alternating sojourns.
#[pymodule]
fn gamma_telegraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("ConvergenceError", py.get_type::<ConvergenceError>())?;
    m.add_class::<PyMotionParams>()?;
    m.add_class::<PyLawPoint>()?;
    m.add_class::<PyEmpiricalLaw>()?;
    m.add_class::<PyValidationReport>()?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(reg_lower_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(reg_upper_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(upper_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(atom_probability, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(density_grid, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_limit, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_density, m)?)?;
    m.add_function(wrap_pyfunction!(mean_conditional, m)?)?;
    m.add_function(wrap_pyfunction!(parity_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(erlang_parity_expectation, m)?)?;
    m.add_function(wrap_pyfunction!(erlang_mean_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_velocity_and_boundary_labels() {
        assert_eq!(parse_v0("backward").unwrap(), InitialVelocity::Backward);
        for c in BoundaryCase::ALL {
            assert_eq!(parse_case(c.label()).unwrap(), c);
        }
    }

    #[test]
    fn errors_map_to_python_exception_types() {
        Python::initialize();
        Python::attach(|py| {
            let e = to_py(core::Error::Domain("x".into()));
            assert!(e.is_instance_of::<PyValueError>(py));
            let e = to_py(core::Error::Convergence { partial_sum: 1.0, terms: 3 });
            assert!(e.is_instance_of::<ConvergenceError>(py));
            assert!(parse_case("nowhere").unwrap_err().is_instance_of::<DomainError>(py));
            let p = PyMotionParams::new(1.0, 1.0, 1.0, 1.0, None, Some(2.0)).unwrap();
            assert!(mean_conditional(&p, 1.0, "forward", 1e-12).unwrap_err().is_instance_of::<DomainError>(py));
        });
    }
}
