//! Python bindings for `vecstoch`.
//!
//! Matrices cross the boundary as the two classes below; every report comes
//! back as a plain dict with the same keys as the CLI's JSON output. Scalars
//! in vector-entry matrices are floats over ℝ, `[re, im]` over ℂ and
//! `[w, x, y, z]` over ℍ.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use vecstoch::{
    BistochasticMatrix as CoreBistochastic, Field, Mode, SearchConfig, VectorEntryMatrix as CoreVectorEntry,
};

create_exception!(vecstoch_py, VecstochError, PyValueError, "An error reported by vecstoch.");

fn raise(e: vecstoch::Error) -> PyErr {
    VecstochError::new_err(format!("{}: {e}", e.code()))
}

fn parse<T: std::str::FromStr<Err = vecstoch::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(raise)
}

/// Serializes through JSON so dicts match the CLI output key for key.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| raise(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A report dict whose matrix entry is swapped for a `VectorEntryMatrix`.
fn with_matrix<'py, T: Serialize>(
    py: Python<'py>,
    value: &T,
    key: &str,
    v: &CoreVectorEntry,
) -> PyResult<Bound<'py, PyAny>> {
    let obj = to_py(py, value)?;
    obj.cast::<PyDict>()?.set_item(key, VectorEntryMatrix(v.clone()))?;
    Ok(obj)
}

/// A bistochastic matrix: nonnegative, unit row and column sums.
#[pyclass(module = "vecstoch_py", skip_from_py_object)]
#[derive(Clone)]
pub struct BistochasticMatrix(CoreBistochastic);

#[pymethods]
impl BistochasticMatrix {
    #[new]
    #[pyo3(signature = (rows, tol = vecstoch::DEFAULT_TOL))]
    fn new(rows: Vec<Vec<f64>>, tol: f64) -> PyResult<Self> {
        CoreBistochastic::with_tol(rows, tol).map(Self).map_err(raise)
    }

    #[staticmethod]
    fn uniform(n: usize) -> Self {
        Self(CoreBistochastic::uniform(n))
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(CoreBistochastic::identity(n))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.0.rows()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<f64> {
        let n = self.0.n();
        if row >= n || col >= n {
            return Err(VecstochError::new_err(format!("index ({row}, {col}) out of range for n = {n}")));
        }
        Ok(self.0.get(row, col))
    }

    /// Largest entrywise difference from another matrix of the same size.
    fn max_abs_diff(&self, other: &BistochasticMatrix) -> PyResult<f64> {
        if other.0.n() != self.0.n() {
            return Err(VecstochError::new_err("matrices have different sizes"));
        }
        Ok(self.0.max_abs_diff(other.0.as_slice()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("bistochastic matrices serialize")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| raise(e.into()))
    }

    fn __repr__(&self) -> String {
        format!("BistochasticMatrix({:?})", self.0.rows())
    }

    fn __eq__(&self, other: &BistochasticMatrix) -> bool {
        self.0 == other.0
    }
}

/// An `n × n` matrix whose entries are vectors in `F^d`.
#[pyclass(module = "vecstoch_py", skip_from_py_object)]
#[derive(Clone)]
pub struct VectorEntryMatrix(CoreVectorEntry);

#[pymethods]
impl VectorEntryMatrix {
    /// `rows[row][col]` is a list of `d` scalars.
    #[new]
    fn new(py: Python<'_>, field: &str, rows: Bound<'_, PyAny>) -> PyResult<Self> {
        let field: Field = parse(field)?;
        let n = rows.len()?;
        let d = if n == 0 { 0 } else { rows.get_item(0)?.get_item(0)?.len()? };
        let doc = PyDict::new(py);
        doc.set_item("field", field.to_string())?;
        doc.set_item("n", n)?;
        doc.set_item("d", d)?;
        doc.set_item("rows", rows)?;
        let text: String = py.import("json")?.call_method1("dumps", (doc,))?.extract()?;
        serde_json::from_str(&text).map(Self).map_err(|e| raise(e.into()))
    }

    #[getter]
    fn field(&self) -> String {
        self.0.field().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    fn rows<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)?.get_item("rows")
    }

    /// The flat row-major list of `‖v_i^j‖²`, valid or not.
    fn squared_norms(&self) -> Vec<f64> {
        self.0.squared_norms()
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("vector-entry matrices serialize")
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| raise(e.into()))
    }

    fn __repr__(&self) -> String {
        format!("VectorEntryMatrix(field={}, n={}, d={})", self.0.field(), self.0.n(), self.0.d())
    }

    fn __eq__(&self, other: &VectorEntryMatrix) -> bool {
        self.0 == other.0
    }
}

/// `ν(V)`: squared entry norms, checked to form a bistochastic matrix.
#[pyfunction]
#[pyo3(signature = (v, tol = 1e-9))]
fn nu(v: &VectorEntryMatrix, tol: f64) -> PyResult<BistochasticMatrix> {
    vecstoch::nu(&v.0, tol).map(BistochasticMatrix).map_err(raise)
}

#[pyfunction]
#[pyo3(signature = (v, tol = 1e-9))]
fn is_isometry<'py>(py: Python<'py>, v: &VectorEntryMatrix, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vecstoch::is_isometry(&v.0, tol))
}

#[pyfunction]
fn dims<'py>(py: Python<'py>, field: &str, n: usize, d: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vecstoch::dims(parse(field)?, n, d).map_err(raise)?)
}

#[pyfunction]
fn solve_cyclic(xi: Vec<f64>) -> PyResult<Vec<f64>> {
    vecstoch::solve_cyclic(&xi).map_err(raise)
}

#[pyfunction]
fn check_feasibility<'py>(py: Python<'py>, p: &BistochasticMatrix) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &vecstoch::check_feasibility(&p.0).map_err(raise)?)
}

/// The `d = n − 1` real construction for odd `n`; `mode` is `"weighted"` or
/// `"paper"`.
#[pyfunction]
#[pyo3(signature = (p, mode = "weighted"))]
fn construct_nminus1<'py>(
    py: Python<'py>,
    p: &BistochasticMatrix,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let mode: Mode = parse(mode)?;
    let res = vecstoch::construct_nminus1(&p.0, mode).map_err(raise)?;
    with_matrix(py, &res, "V", &res.v)
}

#[pyfunction]
fn construct_full(p: &BistochasticMatrix, field: &str, d: usize) -> PyResult<VectorEntryMatrix> {
    vecstoch::construct_full(&p.0, parse(field)?, d).map(VectorEntryMatrix).map_err(raise)
}

fn search_config(
    p: &BistochasticMatrix,
    field: Field,
    d: usize,
    seed: u64,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    tol: Option<f64>,
) -> SearchConfig {
    let mut cfg = SearchConfig::new(field, p.0.n(), d, seed);
    cfg.restarts = restarts.unwrap_or(cfg.restarts);
    cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
    cfg.success_tol = tol.unwrap_or(cfg.success_tol);
    cfg
}

/// Searches for a `d`-dimensional witness; `best_v` is always returned and
/// `success` says whether it meets the tolerance.
#[pyfunction]
#[pyo3(signature = (p, field, d, seed = 0, restarts = None, max_iters = None, tol = None))]
#[allow(clippy::too_many_arguments)]
fn search_fixed_d<'py>(
    py: Python<'py>,
    p: &BistochasticMatrix,
    field: &str,
    d: usize,
    seed: u64,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    tol: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = search_config(p, parse(field)?, d, seed, restarts, max_iters, tol);
    let res = py.detach(|| vecstoch::search_fixed_d(&p.0, &cfg)).map_err(raise)?;
    with_matrix(py, &res, "best_v", &res.best_v)
}

/// Smallest `d` found to work, with the certificate that achieved it.
#[pyfunction]
#[pyo3(signature = (p, field, seed = 0))]
fn estimate_dmin<'py>(
    py: Python<'py>,
    p: &BistochasticMatrix,
    field: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = search_config(p, parse(field)?, 1, seed, None, None, None);
    let est = py.detach(|| vecstoch::estimate_dmin(&p.0, cfg.field, &cfg)).map_err(raise)?;
    let out = PyDict::new(py);
    out.set_item("field", est.field.to_string())?;
    out.set_item("d_est", est.d_est)?;
    let cert = est.certificate();
    out.set_item("certificate", with_matrix(py, cert, "best_v", &cert.best_v)?)?;
    Ok(out.into_any())
}

#[pyfunction]
#[pyo3(signature = (n, samples, field = "R", seed = 0))]
fn scan<'py>(
    py: Python<'py>,
    n: usize,
    samples: usize,
    field: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let field: Field = parse(field)?;
    let report = py.detach(|| vecstoch::scan(field, n, samples, seed)).map_err(raise)?;
    to_py(py, &report)
}

#[pyfunction]
fn sample_sinkhorn(n: usize, seed: u64) -> PyResult<BistochasticMatrix> {
    vecstoch::sample_sinkhorn(n, seed).map(BistochasticMatrix).map_err(raise)
}

#[pyfunction]
fn sample_birkhoff(n: usize, k: usize, seed: u64) -> PyResult<BistochasticMatrix> {
    vecstoch::sample_birkhoff(n, k, seed).map(BistochasticMatrix).map_err(raise)
}

#[pyfunction]
#[pyo3(signature = (field, n, d, seed))]
fn sample_isometry(field: &str, n: usize, d: usize, seed: u64) -> PyResult<VectorEntryMatrix> {
    vecstoch::sample_isometry(parse(field)?, n, d, seed).map(VectorEntryMatrix).map_err(raise)
}

/// Row permutation `sigma` and column permutation `tau`.
#[pyfunction]
fn act_perm(v: &VectorEntryMatrix, sigma: Vec<usize>, tau: Vec<usize>) -> PyResult<VectorEntryMatrix> {
    vecstoch::act_perm(&v.0, &sigma, &tau).map(VectorEntryMatrix).map_err(raise)
}

#[pyfunction]
fn realify(v: &VectorEntryMatrix) -> PyResult<VectorEntryMatrix> {
    vecstoch::realify(&v.0).map(VectorEntryMatrix).map_err(raise)
}

#[pyfunction]
fn complexify_from_quaternion(v: &VectorEntryMatrix) -> PyResult<VectorEntryMatrix> {
    vecstoch::complexify_from_quaternion(&v.0).map(VectorEntryMatrix).map_err(raise)
}

#[pyfunction]
fn pad_dimension(v: &VectorEntryMatrix, new_d: usize) -> PyResult<VectorEntryMatrix> {
    vecstoch::pad_dimension(&v.0, new_d).map(VectorEntryMatrix).map_err(raise)
}

#[pyfunction]
fn lift_field(v: &VectorEntryMatrix, field: &str) -> PyResult<VectorEntryMatrix> {
    vecstoch::lift_field(&v.0, parse(field)?).map(VectorEntryMatrix).map_err(raise)
}

#[pymodule]
pub fn vecstoch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VecstochError", m.py().get_type::<VecstochError>())?;
    m.add_class::<BistochasticMatrix>()?;
    m.add_class::<VectorEntryMatrix>()?;
    m.add_function(wrap_pyfunction!(nu, m)?)?;
    m.add_function(wrap_pyfunction!(is_isometry, m)?)?;
    m.add_function(wrap_pyfunction!(dims, m)?)?;
    m.add_function(wrap_pyfunction!(solve_cyclic, m)?)?;
    m.add_function(wrap_pyfunction!(check_feasibility, m)?)?;
    m.add_function(wrap_pyfunction!(construct_nminus1, m)?)?;
    m.add_function(wrap_pyfunction!(construct_full, m)?)?;
    m.add_function(wrap_pyfunction!(search_fixed_d, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_dmin, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(sample_sinkhorn, m)?)?;
    m.add_function(wrap_pyfunction!(sample_birkhoff, m)?)?;
    m.add_function(wrap_pyfunction!(sample_isometry, m)?)?;
    m.add_function(wrap_pyfunction!(act_perm, m)?)?;
    m.add_function(wrap_pyfunction!(realify, m)?)?;
    m.add_function(wrap_pyfunction!(complexify_from_quaternion, m)?)?;
    m.add_function(wrap_pyfunction!(pad_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(lift_field, m)?)?;
    Ok(())
}
