//! Python bindings: code registry, single-shot decoding and Monte Carlo
//! experiments.

use std::sync::Arc;

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use symbreak_core::codes::{CssCode, ErrorType};
use symbreak_core::gf2::BinVector;
use symbreak_core::harness::{run_experiment, DecoderSpec, ExperimentSpec, PreparedDecoder};
use symbreak_core::noise::NoiseModel;
use symbreak_core::registry::Registry;
use symbreak_core::symbreak::{self, SymBreakConfig};
use symbreak_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::UnknownCode(_) => PyKeyError::new_err(e.to_string()),
        Error::Invariant(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_error_type(s: &str) -> PyResult<ErrorType> {
    s.parse::<ErrorType>().map_err(py_err)
}

// Vec<u8> would cross into Python as `bytes`; lists of ints are friendlier.
fn bits(v: &BinVector) -> Vec<u32> {
    v.to_u8().into_iter().map(u32::from).collect()
}

fn dense(rows: &[Vec<u8>]) -> Vec<Vec<u32>> {
    rows.iter().map(|r| r.iter().map(|&b| u32::from(b)).collect()).collect()
}

fn from_bits(bits: &[u8], expected: usize, what: &str) -> PyResult<BinVector> {
    if bits.len() != expected {
        return Err(PyValueError::new_err(format!("{what} has {} entries, expected {expected}", bits.len())));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(PyValueError::new_err(format!("{what} entries must be 0 or 1")));
    }
    Ok(BinVector::from_u8(bits))
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A CSS code from the bundled registry (or `SYMBREAK_REGISTRY`).
#[pyclass(frozen, name = "Code", module = "symbreak_py")]
struct PyCode {
    inner: Arc<CssCode>,
}

#[pymethods]
impl PyCode {
    #[new]
    fn new(label: &str) -> PyResult<Self> {
        let code = Registry::load_default().and_then(|r| r.get(label)).map_err(py_err)?;
        Ok(PyCode { inner: Arc::new(code) })
    }

    #[getter]
    fn label(&self) -> &str {
        &self.inner.label
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    /// Dense rows of the X-check matrix.
    #[getter]
    fn hx(&self) -> Vec<Vec<u32>> {
        dense(&self.inner.hx.to_dense())
    }

    #[getter]
    fn hz(&self) -> Vec<Vec<u32>> {
        dense(&self.inner.hz.to_dense())
    }

    /// Summary of the structural checks, as printed by `symbreak codes check`.
    fn check(&self) -> PyResult<String> {
        self.inner.check().map(|r| r.to_string()).map_err(py_err)
    }

    /// Syndrome of an error of the given type (`"x"` or `"z"`), as 0/1 lists.
    #[pyo3(signature = (error, error_type = "x"))]
    fn syndrome(&self, error: Vec<u8>, error_type: &str) -> PyResult<Vec<u32>> {
        let t = parse_error_type(error_type)?;
        let e = from_bits(&error, self.inner.n, "error")?;
        self.inner.checks_for(t).matvec(&e).map(|s| bits(&s)).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Code({:?}, n={}, k={})", self.inner.label, self.inner.n, self.inner.k)
    }
}

/// Labels of all registry codes.
#[pyfunction]
fn list_codes() -> PyResult<Vec<String>> {
    let reg = Registry::load_default().map_err(py_err)?;
    Ok(reg.labels().map(str::to_string).collect())
}

/// Decodes one syndrome. `decoder` is a name (`bp`, `bp_osd0`,
/// `bp_osd_cs`, `symbreak`, `ml`, `null`) or a JSON object; priors come from
/// a depolarizing rate `p`.
#[pyfunction]
#[pyo3(signature = (code, syndrome, error_type = "x", decoder = "symbreak", p = 0.003))]
fn decode<'py>(
    py: Python<'py>,
    code: &PyCode,
    syndrome: Vec<u8>,
    error_type: &str,
    decoder: &str,
    p: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let t = parse_error_type(error_type)?;
    let spec = if decoder.trim_start().starts_with('{') {
        let value = serde_json::from_str(decoder).map_err(|e| PyValueError::new_err(e.to_string()))?;
        DecoderSpec::from_json(value).map_err(py_err)?
    } else {
        DecoderSpec::from_name(decoder).map_err(py_err)?
    };
    let s = from_bits(&syndrome, code.inner.checks_for(t).rows(), "syndrome")?;
    let noise = NoiseModel::Depolarizing { p };
    noise.validate().map_err(py_err)?;
    let out = PreparedDecoder::new(&spec, &code.inner, &noise, t)
        .and_then(|d| d.decode(&s))
        .map_err(py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("estimate", bits(&out.estimate))?;
    dict.set_item("converged", out.converged)?;
    dict.set_item("stop_reason", out.stop_reason)?;
    Ok(dict)
}

/// SymBreak with its full diagnostic outcome (splits, d trajectory, wall
/// time). `config` is an optional JSON SymBreak configuration.
#[pyfunction]
#[pyo3(signature = (code, syndrome, error_type = "x", p = 0.003, config = None))]
fn symbreak_decode<'py>(
    py: Python<'py>,
    code: &PyCode,
    syndrome: Vec<u8>,
    error_type: &str,
    p: f64,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let t = parse_error_type(error_type)?;
    let mut cfg: SymBreakConfig = match config {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?,
        None => SymBreakConfig::default(),
    };
    let marginal = NoiseModel::Depolarizing { p }.marginal(t);
    cfg.bp.prior_llr = vec![symbreak_core::bp::prior_from_error_rate(marginal).map_err(py_err)?; code.inner.n];
    let s = from_bits(&syndrome, code.inner.checks_for(t).rows(), "syndrome")?;
    let out = py
        .detach(|| symbreak::decode(&code.inner, &s, &cfg, t))
        .map_err(py_err)?;
    json_to_py(py, &out)
}

/// Runs an experiment described by a JSON string (same schema as the CLI
/// config) and returns the result as a dict.
#[pyfunction]
fn run_experiment_json<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyAny>> {
    let spec: ExperimentSpec = serde_json::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let result = py
        .detach(|| Registry::load_default().and_then(|reg| run_experiment(&spec, &reg)))
        .map_err(py_err)?;
    json_to_py(py, &result)
}

#[pymodule]
fn symbreak_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(list_codes, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(symbreak_decode, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment_json, m)?)?;
    Ok(())
}
