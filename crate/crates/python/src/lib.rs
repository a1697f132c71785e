//! Python bindings: parse, resize, verify and generate circuits.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qreuse_core::benchgen::{self, SecretString};
use qreuse_core::dag::{build_dag, dependency_table, DependencyTable};
use qreuse_core::verify::{self, OutcomeDistribution, DEFAULT_NODE_BUDGET, DEFAULT_TOLERANCE};
use qreuse_core::{count_gates, emit_qasm as emit, parse_qasm as parse, plan_report};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Circuit", module = "qreuse", from_py_object)]
#[derive(Clone)]
struct Circuit {
    inner: qreuse_core::Circuit,
}

#[pymethods]
impl Circuit {
    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits
    }

    #[getter]
    fn num_clbits(&self) -> usize {
        self.inner.num_clbits
    }

    fn __len__(&self) -> usize {
        self.inner.instructions.len()
    }

    fn to_qasm(&self) -> PyResult<String> {
        emit(&self.inner).map_err(value_error)
    }

    /// Gate counts as a JSON object.
    fn gate_counts(&self) -> PyResult<String> {
        serde_json::to_string(&count_gates(&self.inner)).map_err(value_error)
    }

    fn validate(&self) -> Vec<String> {
        self.inner.validate()
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(num_qubits={}, num_clbits={}, instructions={})",
            self.inner.num_qubits,
            self.inner.num_clbits,
            self.inner.instructions.len()
        )
    }
}

#[pyclass(name = "ResizePlan", module = "qreuse", skip_from_py_object)]
struct ResizePlan {
    inner: qreuse_core::ResizePlan,
}

#[pymethods]
impl ResizePlan {
    #[getter]
    fn width(&self) -> usize {
        self.inner.width
    }

    #[getter]
    fn original_width(&self) -> usize {
        self.inner.original_width
    }

    #[getter]
    fn resizable(&self) -> bool {
        self.inner.resizable
    }

    #[getter]
    fn resets_added(&self) -> usize {
        self.inner.resets_added
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    #[getter]
    fn resized(&self) -> Circuit {
        Circuit {
            inner: self.inner.resized.clone(),
        }
    }

    /// `(logical, slot, load_pos, release_pos, reset_inserted)` in assignment order.
    #[getter]
    #[allow(clippy::type_complexity)]
    fn tenancies(&self) -> Vec<(usize, usize, Option<usize>, Option<usize>, bool)> {
        self.inner
            .tenancies
            .iter()
            .map(|t| (t.logical.0, t.slot.0, t.load_pos, t.release_pos, t.reset_inserted))
            .collect()
    }

    fn report_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&plan_report(&self.inner)).map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "ResizePlan(width={}, original_width={}, resizable={})",
            self.inner.width, self.inner.original_width, self.inner.resizable
        )
    }
}

#[pyfunction]
fn parse_qasm(text: &str) -> PyResult<Circuit> {
    parse(text).map(|inner| Circuit { inner }).map_err(value_error)
}

#[pyfunction]
fn emit_qasm(circuit: &Circuit) -> PyResult<String> {
    circuit.to_qasm()
}

/// D-lists indexed by qubit.
#[pyfunction]
fn dependency_lists(circuit: &Circuit) -> Vec<Vec<usize>> {
    dependency_table(&build_dag(&circuit.inner))
        .lists
        .iter()
        .map(|l| l.members.iter().map(|q| q.0).collect())
        .collect()
}

/// Resizes a circuit, optionally with a JSON dependency-list override.
#[pyfunction]
#[pyo3(signature = (circuit, deps_json = None))]
fn resize(circuit: &Circuit, deps_json: Option<&str>) -> PyResult<ResizePlan> {
    let inner = match deps_json {
        Some(json) => {
            let table = DependencyTable::from_override_json(json, &circuit.inner).map_err(value_error)?;
            qreuse_core::resize(&circuit.inner, &table)
        }
        None => qreuse_core::resize_circuit(&circuit.inner),
    }
    .map_err(value_error)?;
    Ok(ResizePlan { inner })
}

/// Exact outcome distribution keyed by classical bit string (bit 0 rightmost).
#[pyfunction]
fn simulate(circuit: &Circuit) -> PyResult<BTreeMap<String, f64>> {
    verify::simulate(&circuit.inner).map(|d| d.probs).map_err(value_error)
}

/// Returns `(tvd, equivalent)`.
#[pyfunction]
#[pyo3(signature = (a, b, tolerance = DEFAULT_TOLERANCE))]
fn check_equivalence(a: &Circuit, b: &Circuit, tolerance: f64) -> PyResult<(f64, bool)> {
    let report = verify::check_equivalence(&a.inner, &b.inner, tolerance).map_err(value_error)?;
    Ok((report.tvd, report.equivalent))
}

#[pyfunction]
fn compute_pst(dist: BTreeMap<String, f64>, correct: Vec<String>) -> PyResult<f64> {
    let num_clbits = dist.keys().next().map_or(0, String::len);
    let dist = OutcomeDistribution {
        num_clbits,
        probs: dist,
    };
    verify::compute_pst(&dist, &correct).map_err(value_error)
}

/// Returns `(min_width, witness_order)`.
#[pyfunction]
#[pyo3(signature = (circuit, budget = DEFAULT_NODE_BUDGET))]
fn min_width_oracle(circuit: &Circuit, budget: u64) -> PyResult<(usize, Vec<usize>)> {
    let r = verify::min_width_oracle(&circuit.inner, budget).map_err(value_error)?;
    Ok((r.min_width, r.witness_order))
}

#[pyfunction]
fn gen_bv(secret: &str) -> PyResult<Circuit> {
    let secret: SecretString = secret.parse().map_err(value_error)?;
    Ok(Circuit {
        inner: benchgen::gen_bv(&secret),
    })
}

#[pyfunction]
fn gen_ghz(n: usize) -> PyResult<Circuit> {
    benchgen::gen_ghz(n).map(|inner| Circuit { inner }).map_err(value_error)
}

#[pyfunction]
fn gen_cat(n: usize) -> PyResult<Circuit> {
    benchgen::gen_cat(n).map(|inner| Circuit { inner }).map_err(value_error)
}

#[pyfunction]
fn gen_entangled_block(k: usize) -> PyResult<Circuit> {
    benchgen::gen_entangled_block(k)
        .map(|inner| Circuit { inner })
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (n, m, seed, two_qubit_fraction = 0.5))]
fn gen_random(n: usize, m: usize, seed: u64, two_qubit_fraction: f64) -> PyResult<Circuit> {
    benchgen::gen_random(n, m, seed, two_qubit_fraction)
        .map(|inner| Circuit { inner })
        .map_err(value_error)
}

#[pyfunction]
fn gen_scaling(n: usize, m: usize) -> PyResult<Circuit> {
    benchgen::gen_scaling(n, m)
        .map(|inner| Circuit { inner })
        .map_err(value_error)
}

#[pymodule]
fn qreuse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Circuit>()?;
    m.add_class::<ResizePlan>()?;
    m.add_function(wrap_pyfunction!(parse_qasm, m)?)?;
    m.add_function(wrap_pyfunction!(emit_qasm, m)?)?;
    m.add_function(wrap_pyfunction!(dependency_lists, m)?)?;
    m.add_function(wrap_pyfunction!(resize, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(check_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(compute_pst, m)?)?;
    m.add_function(wrap_pyfunction!(min_width_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(gen_bv, m)?)?;
    m.add_function(wrap_pyfunction!(gen_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(gen_cat, m)?)?;
    m.add_function(wrap_pyfunction!(gen_entangled_block, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    m.add_function(wrap_pyfunction!(gen_scaling, m)?)?;
    Ok(())
}
