//! Python bindings for the kronrod toolkit.
//!
//! The surface mirrors the CLI: constellation dumps, the Q function and
//! normal approximation, preset configs, single-point and full-sweep BER
//! simulation, and curve gain readout. Structured results cross the boundary
//! as plain dicts / lists; configs are JSON strings with the same schema as
//! the CLI's `--config` files.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use kronrod::constellation::{self, SchemeId};
use kronrod::error::Error;
use kronrod::sim;

fn to_py_err(e: Error) -> PyErr {
    if e.is_config() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn scheme_from_int(scheme: u8) -> PyResult<SchemeId> {
    match scheme {
        1 => Ok(SchemeId::Scheme1),
        2 => Ok(SchemeId::Scheme2),
        other => Err(PyValueError::new_err(format!(
            "scheme must be 1 or 2, got {other}"
        ))),
    }
}

/// Gaussian tail integral Q(x).
#[pyfunction]
fn q_function(x: f64) -> f64 {
    constellation::q_function(x)
}

/// Finite-blocklength normal approximation: block error probability at
/// blocklength `n`, rate `rate` (bits/channel use) and linear SNR `snr`.
#[pyfunction]
fn normal_approximation(n: u64, rate: f64, snr: f64) -> PyResult<f64> {
    kronrod::baselines::normal_approximation(n, rate, snr).map_err(to_py_err)
}

/// Factor sets and Kronecker expansion for a scheme, as nested dicts with
/// `points` ([re, im] pairs) and `labels` (bit strings).
#[pyfunction]
#[pyo3(signature = (scheme, m, factors=None))]
fn constellation_report(py: Python<'_>, scheme: u8, m: usize, factors: Option<Vec<usize>>) -> PyResult<Py<PyAny>> {
    let report = constellation::constellation_report(
        scheme_from_int(scheme)?,
        m,
        &factors.unwrap_or_default(),
    )
    .map_err(to_py_err)?;
    let json = serde_json::to_value(&report)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &json)
}

/// Names of the built-in sweep presets.
#[pyfunction]
fn preset_names() -> Vec<String> {
    sim::preset_names().iter().map(|s| s.to_string()).collect()
}

/// JSON text of a built-in preset config.
#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    sim::preset_json(name)
        .map(|s| s.to_string())
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset '{name}'")))
}

fn stat_to_dict<'py>(py: Python<'py>, s: &sim::BerStat) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let (ci_low, ci_high) = s.wilson_ci();
    d.set_item("ebn0_db", s.ebn0_db)?;
    d.set_item("ber", s.ber())?;
    d.set_item("bit_errors", s.bit_errors)?;
    d.set_item("bits_sent", s.bits_sent)?;
    d.set_item("block_errors", s.block_errors)?;
    d.set_item("blocks_sent", s.blocks_sent)?;
    d.set_item("ci_low", ci_low)?;
    d.set_item("ci_high", ci_high)?;
    d.set_item("mean_iters", s.mean_iters())?;
    d.set_item("median_iters", s.median_iters())?;
    d.set_item("max_iters", s.max_iters())?;
    d.set_item("truncated", s.truncated)?;
    d.set_item("wall_s", s.wall_s)?;
    Ok(d)
}

/// Simulate one Eb/N0 point of a JSON config; returns a stats dict.
#[pyfunction]
#[pyo3(signature = (config_json, ebn0_db, point_index=0))]
fn run_point(py: Python<'_>, config_json: &str, ebn0_db: f64, point_index: usize) -> PyResult<Py<PyAny>> {
    let cfg = sim::SimConfig::from_json(config_json).map_err(to_py_err)?;
    let stat = py
        .detach(|| sim::run_point(&cfg, ebn0_db, point_index))
        .map_err(to_py_err)?;
    Ok(stat_to_dict(py, &stat)?.into_any().unbind())
}

/// Run a full sweep; returns a list of stats dicts.
#[pyfunction]
fn run_sweep(py: Python<'_>, config_json: &str) -> PyResult<Py<PyAny>> {
    let cfg = sim::SimConfig::from_json(config_json).map_err(to_py_err)?;
    let stats = py.detach(|| sim::run_sweep(&cfg)).map_err(to_py_err)?;
    let list = PyList::empty(py);
    for s in &stats {
        list.append(stat_to_dict(py, s)?)?;
    }
    Ok(list.into_any().unbind())
}

/// Run a full sweep and return the CSV text the CLI would emit
/// (deterministic: the timing column is zeroed).
#[pyfunction]
fn run_sweep_csv(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = sim::SimConfig::from_json(config_json).map_err(to_py_err)?;
    let stats = py.detach(|| sim::run_sweep(&cfg)).map_err(to_py_err)?;
    let meta = sim::CsvMeta {
        pipeline: cfg.pipeline.to_string(),
        channel: cfg.channel.to_string(),
        preset: None,
        master_seed: cfg.master_seed,
        decoding_delay_symbols: cfg.decoding_delay_symbols().map_err(to_py_err)?,
    };
    Ok(sim::csv_string(&stats, &meta, false))
}

/// Eb/N0 gain (dB) of curve `a` over curve `b` at `target_ber`; curves are
/// lists of (ebn0_db, ber) pairs.
#[pyfunction]
fn gain_at_ber(a: Vec<(f64, f64)>, b: Vec<(f64, f64)>, target_ber: f64) -> PyResult<f64> {
    sim::gain_at_ber(&a, &b, target_ber).map_err(to_py_err)
}

/// Parse a sweep CSV into (ebn0_db, ber) pairs.
#[pyfunction]
fn read_csv_curve(content: &str) -> PyResult<Vec<(f64, f64)>> {
    sim::read_csv_curve(content).map_err(to_py_err)
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

#[pymodule]
fn kronrod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(q_function, m)?)?;
    m.add_function(wrap_pyfunction!(normal_approximation, m)?)?;
    m.add_function(wrap_pyfunction!(constellation_report, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_point, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep_csv, m)?)?;
    m.add_function(wrap_pyfunction!(gain_at_ber, m)?)?;
    m.add_function(wrap_pyfunction!(read_csv_curve, m)?)?;
    Ok(())
}
