//! Python bindings for `halfline_spectra`.
//!
//! Boundary conditions are passed as `sigma`: `None` (or `inf`) is Dirichlet,
//! a finite `sigma >= 0` is the Robin condition `u'(0) = sigma u(0)`.

use std::path::Path;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use halfline_spectra::eigensolver::{self, Rect};
use halfline_spectra::enclosure::{self, BoundSpec};
use halfline_spectra::error::Error;
use halfline_spectra::harness::{self, report};
use halfline_spectra::potential::{self, ExpTerm, PotentialConfig};
use halfline_spectra::resolvent::{self, BoundaryCondition};
use halfline_spectra::specfun;

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn bc_of(sigma: Option<f64>) -> PyResult<BoundaryCondition> {
    match sigma {
        None => Ok(BoundaryCondition::Dirichlet),
        Some(s) => BoundaryCondition::from_sigma(s).map_err(py_err),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// A potential `q` on the half-line.
#[pyclass(name = "Potential", module = "halfline_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPotential {
    inner: potential::Potential,
}

#[pymethods]
impl PyPotential {
    /// `c e^{i phi} e^{-kappa x}`
    #[staticmethod]
    #[pyo3(signature = (c, phi = 0.0, kappa = 1.0))]
    fn exponential(c: f64, phi: f64, kappa: f64) -> Self {
        PyPotential { inner: potential::Potential::exponential(c, phi, kappa) }
    }

    /// `-v0 e^{i phi}` on `[0, width]`
    #[staticmethod]
    #[pyo3(signature = (v0, phi = 0.0, width = 1.0))]
    fn square_well(v0: f64, phi: f64, width: f64) -> Self {
        PyPotential { inner: potential::Potential::square_well(v0, phi, width) }
    }

    /// `c e^{i phi} (1+x)^{-rho}`
    #[staticmethod]
    #[pyo3(signature = (c, phi = 0.0, rho = 2.0))]
    fn power_decay(c: f64, phi: f64, rho: f64) -> Self {
        PyPotential { inner: potential::Potential::power_decay(c, phi, rho) }
    }

    /// Sum of `(c, phi, kappa)` exponential terms.
    #[staticmethod]
    fn exp_sum(terms: Vec<(f64, f64, f64)>) -> Self {
        let terms = terms.into_iter().map(|(c, phi, kappa)| ExpTerm { c, phi, kappa }).collect();
        PyPotential { inner: potential::Potential::exp_sum(terms) }
    }

    #[staticmethod]
    fn zero() -> Self {
        PyPotential { inner: potential::Potential::zero() }
    }

    /// Builds a potential from a TOML table such as `kind = "exponential"\nc = -2.0`.
    #[staticmethod]
    #[pyo3(signature = (text, base_dir = "."))]
    fn from_toml(text: &str, base_dir: &str) -> PyResult<Self> {
        let cfg: PotentialConfig = toml::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyPotential { inner: cfg.build(Path::new(base_dir)).map_err(py_err)? })
    }

    /// The named test potentials as `{name: Potential}`.
    #[staticmethod]
    fn catalog(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
        let d = PyDict::new(py);
        for (name, q) in potential::catalog() {
            d.set_item(name, PyPotential { inner: q })?;
        }
        Ok(d)
    }

    fn __call__(&self, x: f64) -> PyResult<Complex64> {
        self.inner.eval(x).map_err(py_err)
    }

    #[getter]
    fn support_hint(&self) -> f64 {
        self.inner.support_hint
    }

    fn lebesgue_norm(&self, r: f64) -> PyResult<f64> {
        Ok(potential::lebesgue_norm(&self.inner, r).map_err(py_err)?.value)
    }

    fn weighted_norm(&self, tau: f64, r: f64) -> PyResult<f64> {
        Ok(potential::weighted_norm(&self.inner, tau, r).map_err(py_err)?.value)
    }

    fn weak_norm(&self, r: f64) -> PyResult<f64> {
        Ok(potential::weak_norm(&self.inner, r).map_err(py_err)?.value)
    }

    fn lorentz_norm(&self, p: f64, r: f64) -> PyResult<f64> {
        Ok(potential::lorentz_norm(&self.inner, p, r).map_err(py_err)?.value)
    }

    fn distribution_function(&self, t: f64) -> PyResult<f64> {
        potential::distribution_function(&self.inner, t).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Potential({:?})", self.inner.kind)
    }
}

/// Sampled boundary `theta -> R(theta)` of an enclosure region.
#[pyclass(name = "Region", module = "halfline_py", frozen)]
struct PyRegion {
    inner: enclosure::EnclosureRegion,
}

#[pymethods]
impl PyRegion {
    #[getter]
    fn thetas(&self) -> Vec<f64> {
        self.inner.thetas.clone()
    }

    #[getter]
    fn radii(&self) -> Vec<f64> {
        self.inner.radii.clone()
    }

    #[getter]
    fn provenance(&self) -> String {
        self.inner.provenance.to_string()
    }

    #[getter]
    fn negative_axis_radius(&self) -> Option<f64> {
        self.inner.negative_axis_radius
    }

    fn radius_at(&self, lam: Complex64) -> PyResult<f64> {
        self.inner.radius_at(lam).map_err(py_err)
    }

    /// `(R(theta), R(theta) - |lambda|)`
    fn margin(&self, lam: Complex64) -> PyResult<(f64, f64)> {
        self.inner.margin(lam).map_err(py_err)
    }

    /// Containment with the verification tolerance `-1e-9 (1 + R)`.
    fn contains(&self, lam: Complex64) -> PyResult<bool> {
        enclosure::contains_with_tol(&self.inner, lam).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Region({}, {} angles)", self.inner.provenance, self.inner.thetas.len())
    }
}

fn bound_spec(bound: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<BoundSpec> {
    let mut t = toml::Table::new();
    t.insert("bound".into(), toml::Value::String(bound.into()));
    if let Some(d) = params {
        for (k, v) in d.iter() {
            t.insert(k.extract::<String>()?, toml::Value::Float(v.extract::<f64>()?));
        }
    }
    toml::Value::Table(t).try_into().map_err(|e: toml::de::Error| PyValueError::new_err(e.to_string()))
}

/// `g(a) = sup_{y>=0} |e^{iay} - e^{-y}|`, or its Robin analogue when `sigma` is given.
#[pyfunction]
#[pyo3(signature = (a, sigma = None, mu = Complex64::new(0.0, 1.0)))]
fn g(a: f64, sigma: Option<f64>, mu: Complex64) -> PyResult<f64> {
    Ok(specfun::g_eval_sigma_or_plain(a, sigma, mu).map_err(py_err)?.value)
}

/// `(quadrature, closed_form_bound, global_bound)` for the kernel row at `x`.
#[pyfunction]
#[pyo3(signature = (x, lam, alpha, sigma = None))]
fn kernel_row_norm(x: f64, lam: Complex64, alpha: f64, sigma: Option<f64>) -> PyResult<(f64, f64, f64)> {
    let sp = resolvent::spectral_point(lam).map_err(py_err)?;
    let rn = resolvent::kernel_row_norm(x, &sp, alpha, bc_of(sigma)?).map_err(py_err)?;
    Ok((rn.quadrature, rn.closed_form_bound, rn.global_bound))
}

/// Resolves `bound` (e.g. `"thm2"`, `"cor2"` with `{"gamma": 1.0}`) against `q`
/// and samples its region on `n_theta` angles.
#[pyfunction]
#[pyo3(signature = (q, bound, params = None, sigma = None, n_theta = 720))]
fn enclosure_region(
    q: &PyPotential,
    bound: &str,
    params: Option<&Bound<'_, PyDict>>,
    sigma: Option<f64>,
    n_theta: usize,
) -> PyResult<PyRegion> {
    let spec = bound_spec(bound, params)?;
    let b = spec.resolve(&q.inner, bc_of(sigma)?).map_err(py_err)?;
    let region = enclosure::enclosure_region(&b, &enclosure::theta_grid(n_theta, 1e-3)).map_err(py_err)?;
    Ok(PyRegion { inner: region })
}

/// Eigenvalues in the box `(re_min, re_max, im_min, im_max)` as dicts with
/// `lambda`, `residual`, `method` and `truncation_l`.
#[pyfunction]
#[pyo3(signature = (q, search_box, sigma = None, max_count = 64))]
fn find_eigenvalues<'py>(
    py: Python<'py>,
    q: &PyPotential,
    search_box: (f64, f64, f64, f64),
    sigma: Option<f64>,
    max_count: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let (a, b, c, d) = search_box;
    let bc = bc_of(sigma)?;
    let inner = q.inner.clone();
    let found = py
        .detach(move || eigensolver::find_eigenvalues(&inner, &Rect::new(a, b, c, d), bc, max_count))
        .map_err(py_err)?;
    found
        .eigenvalues
        .iter()
        .map(|e| {
            let row = PyDict::new(py);
            row.set_item("lambda", e.lambda)?;
            row.set_item("residual", e.residual)?;
            row.set_item("method", format!("{:?}", e.method))?;
            row.set_item("truncation_l", e.truncation_l)?;
            Ok(row)
        })
        .collect()
}

/// Eigenvalues of the finite-difference discretization on `[0, l]` with `n` cells.
#[pyfunction]
#[pyo3(signature = (q, l = 40.0, n = 4096, sigma = None))]
fn dense_fd_eigs(py: Python<'_>, q: &PyPotential, l: f64, n: usize, sigma: Option<f64>) -> PyResult<Vec<Complex64>> {
    let bc = bc_of(sigma)?;
    let inner = q.inner.clone();
    py.detach(move || eigensolver::dense_fd_eigs(&inner, l, n, bc)).map_err(py_err)
}

/// Runs a campaign described by a TOML document; returns
/// `{"summary": ..., "records": [...]}`.
#[pyfunction]
#[pyo3(signature = (config, jobs = 1, base_dir = "."))]
fn run_campaign<'py>(py: Python<'py>, config: &str, jobs: usize, base_dir: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = harness::CampaignConfig::from_toml_str(config).map_err(py_err)?;
    let campaign = harness::Campaign::from_config(&cfg, Path::new(base_dir)).map_err(py_err)?;
    let result = py.detach(|| harness::run_campaign(&campaign, jobs)).map_err(py_err)?;
    let summary = report::summarize(&result);
    let text = format!("{{\"summary\":{},\"records\":{}}}", to_json(&summary)?, to_json(&result.records)?);
    json_to_py(py, &text)
}

#[pymodule]
pub fn halfline_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_class::<PyRegion>()?;
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_row_norm, m)?)?;
    m.add_function(wrap_pyfunction!(enclosure_region, m)?)?;
    m.add_function(wrap_pyfunction!(find_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(dense_fd_eigs, m)?)?;
    m.add_function(wrap_pyfunction!(run_campaign, m)?)?;
    Ok(())
}
