//! Python bindings: adders, circuits, noise models, moduli selection and
//! distributed addition.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qsmart_core::adders::AdderSpec;
use qsmart_core::circuit::{Circuit, ResourceReport};
use qsmart_core::dqc;
use qsmart_core::rns::{crt_reconstruct, ResidueVector, RnsSet};
use qsmart_core::select::{select_rns, DepthSource, SelectorConfig};
use qsmart_core::sim::{self, NoiseModel, RunSpec};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn resources_dict<'py>(py: Python<'py>, r: &ResourceReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("qubit_count", r.qubit_count)?;
    d.set_item("toffoli_count", r.toffoli_count)?;
    d.set_item("cnot_count", r.cnot_count)?;
    d.set_item("not_count", r.not_count)?;
    d.set_item("toffoli_depth", r.toffoli_depth)?;
    d.set_item("cnot_depth", r.cnot_depth)?;
    d.set_item("total_depth", r.total_depth)?;
    Ok(d)
}

#[pyclass(name = "Circuit", module = "qsmart", skip_from_py_object)]
#[derive(Clone)]
struct PyCircuit {
    inner: Circuit,
}

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Circuit::from_text(text).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn resources<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.inner.resource_report().map_err(value_err)?;
        resources_dict(py, &r)
    }

    /// Applies the circuit to a basis state given as a list of bits.
    fn apply(&self, bits: Vec<bool>) -> PyResult<Vec<bool>> {
        self.inner.apply_permutation(&bits).map_err(value_err)
    }

    /// Noiseless value of the output operand for operands A and B.
    fn run_exact(&self, a: u64, b: u64) -> PyResult<u64> {
        sim::run_exact(&self.inner, &[("A", a), ("B", b)]).map_err(value_err)
    }

    #[pyo3(signature = (a, b, shots, noise=None, seed=0))]
    fn run_shots(
        &self,
        a: u64,
        b: u64,
        shots: u64,
        noise: Option<PyNoiseModel>,
        seed: u64,
    ) -> PyResult<Vec<(u64, u64)>> {
        let model = noise.map(|n| n.inner).unwrap_or_else(NoiseModel::calibrated);
        let h = sim::run_shots(&self.inner, &[("A", a), ("B", b)], shots, &model, seed).map_err(value_err)?;
        Ok(h.into_iter().collect())
    }

    fn __repr__(&self) -> String {
        format!("Circuit({:?}, width={}, gates={})", self.inner.name, self.inner.width(), self.inner.len())
    }
}

#[pyclass(name = "Adder", module = "qsmart", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyAdder {
    inner: AdderSpec,
}

#[pymethods]
impl PyAdder {
    /// `family` is one of full, mod-pow2, mod-pow2-minus1, qdma.
    #[new]
    fn new(family: &str, n: u32) -> PyResult<Self> {
        format!("{family}:{n}").parse().map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn for_modulus(modulus: u64) -> PyResult<Self> {
        AdderSpec::for_modulus(modulus).map(|inner| Self { inner }).map_err(value_err)
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.as_str()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter]
    fn modulus(&self) -> Option<u64> {
        self.inner.modulus()
    }

    fn build(&self) -> PyCircuit {
        PyCircuit { inner: self.inner.build() }
    }

    fn encode(&self, value: u64) -> PyResult<u64> {
        self.inner.encode_operand(value).map_err(value_err)
    }

    fn decode(&self, bits: u64) -> u64 {
        self.inner.decode_output(bits)
    }

    fn expected_sum(&self, a: u64, b: u64) -> PyResult<u64> {
        self.inner.expected_sum(a, b).map_err(value_err)
    }

    /// Mean correct-output probability over input pairs.
    #[pyo3(signature = (noise=None, shots=None, seed=0))]
    fn output_probability(&self, noise: Option<PyNoiseModel>, shots: Option<u64>, seed: u64) -> PyResult<f64> {
        let model = noise.map(|n| n.inner).unwrap_or_else(NoiseModel::calibrated);
        let mut spec = RunSpec::for_adder(self.inner, seed);
        if let Some(s) = shots {
            spec = spec.with_shots(s);
        }
        sim::output_probability(&spec, &model).map(|e| e.mean).map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!("Adder('{}')", self.inner)
    }
}

#[pyclass(name = "NoiseModel", module = "qsmart", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyNoiseModel {
    inner: NoiseModel,
}

#[pymethods]
impl PyNoiseModel {
    #[new]
    fn new(p_not: f64, p_cnot: f64, p_toffoli: f64) -> PyResult<Self> {
        NoiseModel::new(p_not, p_cnot, p_toffoli).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn calibrated() -> Self {
        Self { inner: NoiseModel::calibrated() }
    }

    #[staticmethod]
    fn zero() -> Self {
        Self { inner: NoiseModel::zero() }
    }

    #[getter]
    fn p_not(&self) -> f64 {
        self.inner.p_not
    }

    #[getter]
    fn p_cnot(&self) -> f64 {
        self.inner.p_cnot
    }

    #[getter]
    fn p_toffoli(&self) -> f64 {
        self.inner.p_toffoli
    }

    fn __repr__(&self) -> String {
        format!("NoiseModel({})", self.inner)
    }
}

/// Moduli chosen for the range [0, k).
#[pyfunction]
#[pyo3(name = "select_rns", signature = (k, efficiency=0.9, depths="paper"))]
fn py_select_rns(k: u64, efficiency: f64, depths: &str) -> PyResult<Vec<u64>> {
    let source: DepthSource = depths.parse().map_err(value_err)?;
    let cfg = SelectorConfig::new(k).with_efficiency(efficiency).with_depth_source(source);
    select_rns(&cfg).map(|s| s.moduli().to_vec()).map_err(value_err)
}

/// Efficiency of a moduli set as a fraction in (0, 1].
#[pyfunction]
#[pyo3(name = "rns_efficiency")]
fn py_rns_efficiency(moduli: Vec<u64>, k: u64) -> PyResult<f64> {
    let set = RnsSet::new(&moduli).map_err(value_err)?;
    set.efficiency(k).map(|e| e.as_f64()).map_err(value_err)
}

#[pyfunction]
#[pyo3(name = "crt_reconstruct")]
fn py_crt_reconstruct(residues: Vec<u64>, moduli: Vec<u64>) -> PyResult<u64> {
    let set = RnsSet::new(&moduli).map_err(value_err)?;
    let rv = ResidueVector::new(&set, residues).map_err(value_err)?;
    crt_reconstruct(&rv).map_err(value_err)
}

/// Adds a and b as independent residue jobs; returns a summary dict.
#[pyfunction]
#[pyo3(name = "distributed_add", signature = (a, b, k, efficiency=0.9, noise=None, shots=100, seed=0, workers=1))]
#[allow(clippy::too_many_arguments)]
fn py_distributed_add<'py>(
    py: Python<'py>,
    a: u64,
    b: u64,
    k: u64,
    efficiency: f64,
    noise: Option<PyNoiseModel>,
    shots: u64,
    seed: u64,
    workers: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let model = noise.map(|n| n.inner).unwrap_or_else(NoiseModel::calibrated);
    let set = select_rns(&SelectorConfig::new(k).with_efficiency(efficiency)).map_err(value_err)?;
    let sum = py.detach(|| dqc::distributed_add(a, b, &set, shots, seed, workers, &model)).map_err(runtime_err)?;
    let d = PyDict::new(py);
    d.set_item("moduli", sum.moduli.clone())?;
    d.set_item("residues", sum.jobs.iter().map(|j| j.residue).collect::<Vec<_>>())?;
    d.set_item("sum", sum.sum)?;
    d.set_item("set_output_probability", sum.set_output_probability)?;
    d.set_item("end_to_end_probability", sum.end_to_end_probability)?;
    d.set_item("tie", sum.tie)?;
    Ok(d)
}

#[pymodule]
fn qsmart(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyAdder>()?;
    m.add_class::<PyNoiseModel>()?;
    m.add_function(wrap_pyfunction!(py_select_rns, m)?)?;
    m.add_function(wrap_pyfunction!(py_rns_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(py_crt_reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(py_distributed_add, m)?)?;
    Ok(())
}
