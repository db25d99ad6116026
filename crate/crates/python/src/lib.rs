//! Python bindings. Frames, matrices and tuples cross the boundary as
//! wrapper classes with JSON round trips; reports come back as dicts.

use modframe::explorer::generators::{near_eip_parseval, random_frame, random_projection, random_tuple, unit_norm_start};
use modframe::explorer::io::{
    frame_to_value, matrix_to_value, parse_frame, parse_matrix, parse_tuple, tuple_to_value,
};
use modframe::explorer::{jl_trial as jl, random_parseval_frame, run_experiment as run, ExperimentConfig};
use modframe::opscale::{operator_scale, tuple_certify};
use modframe::paulsen::{cfm_flow, imp_check as imp, modular_paulsen_solve_with, projection_construct_with};
use modframe::{AlgebraSignature, FrameSystem, ModuleMatrix, MatrixTuple as CoreTuple, PaulsenSolver};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde_json::Value;

fn py_err(e: modframe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sig(sizes: Vec<usize>) -> PyResult<AlgebraSignature> {
    AlgebraSignature::new(sizes).map_err(py_err)
}

fn solver(name: &str) -> PyResult<PaulsenSolver> {
    match name {
        "alternation" => Ok(PaulsenSolver::Alternation),
        "operator_scaling" | "operator-scaling" => Ok(PaulsenSolver::OperatorScaling),
        other => Err(PyValueError::new_err(format!("unknown solver {other:?}"))),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

#[pyclass(name = "Frame", module = "modframe_py")]
struct Frame(FrameSystem);

#[pymethods]
impl Frame {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_frame(text).map(Frame).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (signature, d, n, seed=0))]
    fn random(signature: Vec<usize>, d: usize, n: usize, seed: u64) -> PyResult<Self> {
        random_frame(&sig(signature)?, d, n, seed).map(Frame).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (signature, d, n, seed=0))]
    fn random_parseval(signature: Vec<usize>, d: usize, n: usize, seed: u64) -> PyResult<Self> {
        random_parseval_frame(&sig(signature)?, d, n, seed).map(Frame).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (signature, d, n, eps, seed=0))]
    fn near_eip_parseval(signature: Vec<usize>, d: usize, n: usize, eps: f64, seed: u64) -> PyResult<Self> {
        near_eip_parseval(&sig(signature)?, d, n, eps, seed).map(Frame).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, d, delta, seed=0))]
    fn unit_norm(n: usize, d: usize, delta: f64, seed: u64) -> PyResult<Self> {
        unit_norm_start(n, d, delta, seed).map(Frame).map_err(py_err)
    }

    fn to_json(&self) -> String {
        frame_to_value(&self.0).to_string()
    }

    #[getter]
    fn signature(&self) -> Vec<usize> {
        self.0.signature().sizes().to_vec()
    }

    #[getter]
    fn d(&self) -> usize {
        self.0.d()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[pyo3(signature = (tol=1e-8))]
    fn certify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let c = self.0.certify(tol);
        let d = PyDict::new(py);
        d.set_item("lower", c.lower)?;
        d.set_item("upper", c.upper)?;
        d.set_item("parseval_eps", c.parseval_eps)?;
        d.set_item("equal_inner_eps", c.equal_inner_eps)?;
        d.set_item("combined_eps", c.combined_eps())?;
        d.set_item("is_frame", c.is_frame)?;
        Ok(d)
    }

    #[pyo3(signature = (tol=1e-8))]
    fn closest_parseval(&self, tol: f64) -> PyResult<Self> {
        self.0.closest_parseval(tol).map(Frame).map_err(py_err)
    }

    #[pyo3(signature = (tol=1e-8))]
    fn equal_inner_normalize(&self, tol: f64) -> PyResult<Self> {
        self.0.equal_inner_normalize(tol).map(Frame).map_err(py_err)
    }

    #[pyo3(signature = (tol=1e-8))]
    fn naimark_complement(&self, tol: f64) -> PyResult<Self> {
        self.0.naimark_complement(tol).map(Frame).map_err(py_err)
    }

    /// Returns `(frame, report)`.
    #[pyo3(signature = (tol=1e-8, max_iter=500, solver="alternation"))]
    fn paulsen<'py>(&self, py: Python<'py>, tol: f64, max_iter: usize, solver: &str) -> PyResult<(Self, Bound<'py, PyDict>)> {
        let r = modular_paulsen_solve_with(&self.0, tol, max_iter, self::solver(solver)?).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("achieved_dist_sq", r.achieved_dist_sq)?;
        d.set_item("iterations", r.iterations)?;
        d.set_item("final_parseval_eps", r.final_parseval_eps)?;
        d.set_item("final_equal_inner_eps", r.final_equal_inner_eps)?;
        d.set_item("converged", r.converged)?;
        Ok((Frame(r.output), d))
    }

    /// Returns `(frame, residuals)`.
    #[pyo3(signature = (step=0.1, max_iter=500, tol=1e-8))]
    fn cfm(&self, step: f64, max_iter: usize, tol: f64) -> PyResult<(Self, Vec<f64>)> {
        let (g, trace) = cfm_flow(&self.0, step, max_iter, tol).map_err(py_err)?;
        Ok((Frame(g), trace.records.iter().map(|r| r.residual).collect()))
    }

    fn __repr__(&self) -> String {
        format!("Frame(signature={:?}, d={}, n={})", self.0.signature().sizes(), self.0.d(), self.0.n())
    }
}

#[pyclass(name = "ModuleMatrix", module = "modframe_py")]
struct Matrix(ModuleMatrix);

#[pymethods]
impl Matrix {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_matrix(text).map(Matrix).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (signature, d, n, eps, seed=0))]
    fn random_projection(signature: Vec<usize>, d: usize, n: usize, eps: f64, seed: u64) -> PyResult<Self> {
        random_projection(&sig(signature)?, d, n, eps, seed).map(Matrix).map_err(py_err)
    }

    fn to_json(&self) -> String {
        matrix_to_value(&self.0).to_string()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.rows(), self.0.cols())
    }

    /// Returns `(q, report)`.
    #[pyo3(signature = (tol=1e-8, max_iter=500, solver="alternation"))]
    fn project<'py>(&self, py: Python<'py>, tol: f64, max_iter: usize, solver: &str) -> PyResult<(Self, Bound<'py, PyDict>)> {
        let r = projection_construct_with(&self.0, tol, max_iter, self::solver(solver)?).map_err(py_err)?;
        let d = PyDict::new(py);
        d.set_item("rank", r.rank)?;
        d.set_item("epsilon_in", r.epsilon_in)?;
        d.set_item("projection_dist_sq", r.projection_dist_sq)?;
        d.set_item("solver_dist_sq", r.solver_dist_sq)?;
        d.set_item("bound_ok", r.bound_ok)?;
        d.set_item("converged", r.converged)?;
        d.set_item("commutative", r.commutative)?;
        d.set_item("idempotence_error", r.idempotence_error)?;
        d.set_item("self_adjoint_error", r.self_adjoint_error)?;
        d.set_item("max_diag_error", r.max_diag_error)?;
        Ok((Matrix(r.q), d))
    }
}

#[pyclass(name = "MatrixTuple", module = "modframe_py")]
struct Tuple(CoreTuple);

#[pymethods]
impl Tuple {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_tuple(text).map(Tuple).map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (signature, m, n, k, seed=0))]
    fn random(signature: Vec<usize>, m: usize, n: usize, k: usize, seed: u64) -> PyResult<Self> {
        random_tuple(&sig(signature)?, m, n, k, seed).map(Tuple).map_err(py_err)
    }

    fn to_json(&self) -> String {
        tuple_to_value(&self.0).to_string()
    }

    /// Returns `(scaled, report)`.
    #[pyo3(signature = (tol=1e-8, max_iter=500))]
    fn scale<'py>(&self, py: Python<'py>, tol: f64, max_iter: usize) -> PyResult<(Self, Bound<'py, PyDict>)> {
        let r = operator_scale(&self.0, tol, max_iter).map_err(py_err)?;
        let report = tuple_certify(&r.scaled, tol);
        let d = PyDict::new(py);
        d.set_item("converged", r.converged)?;
        d.set_item("iterations", r.iterations)?;
        d.set_item("nearly_eps", report.nearly_eps)?;
        d.set_item("is_doubly_stochastic", report.is_doubly_stochastic)?;
        d.set_item("residual_trace", r.residual_trace)?;
        Ok((Tuple(r.scaled), d))
    }
}

#[pyfunction]
#[pyo3(signature = (f, g, tol=1e-8))]
fn imp_check<'py>(py: Python<'py>, f: &Frame, g: &Frame, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = imp(&f.0, &g.0, tol).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("dist_sq", r.dist_sq)?;
    d.set_item("image_dist_sq", r.image_dist_sq)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("hypothesis_ok", r.hypothesis_ok)?;
    d.set_item("bound_ok", r.bound_ok)?;
    Ok(d)
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (signature, big_n, num_points, eps, m, seed=0, tol=1e-8))]
fn jl_trial<'py>(
    py: Python<'py>,
    signature: Vec<usize>,
    big_n: usize,
    num_points: usize,
    eps: f64,
    m: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = jl(&sig(signature)?, big_n, num_points, eps, m, seed, tol).map_err(py_err)?;
    to_py(py, &serde_json::to_value(&r).expect("serializable"))
}

/// Runs an experiment from a JSON config; returns `(csv, summary)`.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, config: &str) -> PyResult<(String, Bound<'py, PyAny>)> {
    let config = ExperimentConfig::from_json(config).map_err(py_err)?;
    let record = py.detach(|| run(&config)).map_err(py_err)?;
    Ok((record.to_csv(), to_py(py, &record.summary())?))
}

#[pymodule]
fn modframe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Frame>()?;
    m.add_class::<Matrix>()?;
    m.add_class::<Tuple>()?;
    m.add_function(wrap_pyfunction!(imp_check, m)?)?;
    m.add_function(wrap_pyfunction!(jl_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
