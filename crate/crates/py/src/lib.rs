//! Python bindings: N-functions, radial grids and norms, the verify suite,
//! the ground-state solver and a `run` entry point mirroring the CLI.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyString};

use orlicz_core::cli::{execute, CommandKind, RunConfig};
use orlicz_core::nfunction::{FamilyKind, NFunction as CoreNFunction, NFunctionSpec, SobolevConjugate as CoreStar};
use orlicz_core::radial::{self, GridFunction, PotentialSpec, RadialGrid as CoreGrid, Spacing};
use orlicz_core::solver::{mountain_pass_solve, GridConfig, NonlinearitySpec, ProblemSpec, SolverConfig};
use orlicz_core::{cli, Error};

fn py_err(e: Error) -> PyErr {
    if cli::is_config_error(&e) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> PyResult<T> {
    s.parse().map_err(|_| PyValueError::new_err(format!("unknown {what}: {s}")))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// An N-function `A(t)` from one of the built-in families.
#[pyclass(name = "NFunction", module = "orlicz", frozen)]
struct PyNFunction {
    inner: CoreNFunction,
}

#[pymethods]
impl PyNFunction {
    #[new]
    #[pyo3(signature = (family, p=None, q=None, gamma=None))]
    fn new(family: &str, p: Option<f64>, q: Option<f64>, gamma: Option<f64>) -> PyResult<Self> {
        let spec = NFunctionSpec {
            family: parse::<FamilyKind>("family", family)?,
            p,
            q,
            gamma,
            dim: None,
        };
        let inner = CoreNFunction::build(&spec).map_err(py_err)?;
        Ok(PyNFunction { inner })
    }

    #[getter]
    fn l(&self) -> f64 {
        self.inner.l()
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.m()
    }

    /// The Δ₂ constant `K` with `A(2t) <= K A(t)`.
    #[getter]
    fn delta2(&self) -> f64 {
        self.inner.delta2()
    }

    fn __call__(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    fn eval(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    /// `a(t)` with `A'(t) = a(t) t`.
    fn density(&self, t: f64) -> f64 {
        self.inner.density(t)
    }

    /// `A'(t) = a(t) t`.
    fn flux(&self, t: f64) -> f64 {
        self.inner.flux(t)
    }

    fn growth_ratio(&self, t: f64) -> f64 {
        self.inner.growth_ratio(t)
    }

    fn inverse(&self, y: f64) -> PyResult<f64> {
        self.inner.inverse(y).map_err(py_err)
    }

    /// The complementary function `Ã(s)`.
    fn conjugate(&self, s: f64) -> PyResult<f64> {
        self.inner.conjugate_eval(s).map_err(py_err)
    }

    fn sobolev_conjugate(&self, dim: usize) -> PyResult<PySobolevConjugate> {
        let inner = self.inner.sobolev_conjugate(dim).map_err(py_err)?;
        Ok(PySobolevConjugate { inner })
    }

    fn dimension_violations(&self, dim: usize) -> PyResult<Vec<String>> {
        self.inner.spec().dimension_violations(dim).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        let spec = serde_json::to_string(&self.inner.spec()).unwrap_or_default();
        format!("NFunction({spec})")
    }
}

/// The tabulated Sobolev conjugate `A*` in a fixed dimension.
#[pyclass(name = "SobolevConjugate", module = "orlicz", frozen)]
struct PySobolevConjugate {
    inner: CoreStar,
}

#[pymethods]
impl PySobolevConjugate {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn l_star(&self) -> f64 {
        self.inner.l_star()
    }

    /// `inf` when `m >= N`.
    #[getter]
    fn m_star(&self) -> f64 {
        self.inner.m_star()
    }

    fn table_range(&self) -> (f64, f64) {
        self.inner.table_range()
    }

    /// `(A*(t), extrapolated)`.
    fn eval(&self, t: f64) -> (f64, bool) {
        let v = self.inner.eval(t);
        (v.value, v.extrapolated)
    }

    fn inverse(&self, s: f64) -> PyResult<(f64, bool)> {
        let v = self.inner.inverse(s).map_err(py_err)?;
        Ok((v.value, v.extrapolated))
    }
}

/// A radial grid on `[0, R_max]` in `ℝ^N` with `cells` cells.
#[pyclass(name = "RadialGrid", module = "orlicz", frozen)]
struct PyRadialGrid {
    inner: Arc<CoreGrid>,
}

#[pymethods]
impl PyRadialGrid {
    #[new]
    #[pyo3(signature = (dim, r_max, cells, spacing="uniform"))]
    fn new(dim: usize, r_max: f64, cells: usize, spacing: &str) -> PyResult<Self> {
        let spacing = parse::<Spacing>("spacing", spacing)?;
        let inner = CoreGrid::new(dim, r_max, cells, spacing).map_err(py_err)?;
        Ok(PyRadialGrid { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes().to_vec()
    }

    /// Quadrature weights of `∫₀^R g(r) r^{N−1} dr`.
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    /// `∫_{B_R} g(|x|) dx` for nodal values `g`.
    fn integrate(&self, values: Vec<f64>) -> PyResult<f64> {
        let u = self.function(values)?;
        Ok(self.inner.integrate_volume(u.values()))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

impl PyRadialGrid {
    fn function(&self, values: Vec<f64>) -> PyResult<GridFunction> {
        GridFunction::new(self.inner.clone(), values).map_err(py_err)
    }
}

/// `∫ A(|u|) dx`.
#[pyfunction]
fn modular(a: &PyNFunction, grid: &PyRadialGrid, values: Vec<f64>) -> PyResult<f64> {
    let u = grid.function(values)?;
    Ok(radial::modular(&a.inner, &u, None))
}

/// The Luxemburg norm `‖u‖_A`.
#[pyfunction]
fn luxemburg_norm(a: &PyNFunction, grid: &PyRadialGrid, values: Vec<f64>) -> PyResult<f64> {
    let u = grid.function(values)?;
    radial::luxemburg_norm(&a.inner, &u, None).map_err(py_err)
}

/// `‖u‖_A + ‖u'‖_A`.
#[pyfunction]
fn sobolev_norm(a: &PyNFunction, grid: &PyRadialGrid, values: Vec<f64>) -> PyResult<f64> {
    let u = grid.function(values)?;
    radial::sobolev_norm(&a.inner, &u, None).map_err(py_err)
}

fn run_config(py: Python<'_>, config: Option<&Bound<'_, PyAny>>) -> PyResult<RunConfig> {
    let Some(config) = config else {
        return Ok(RunConfig::default());
    };
    let text: String = if config.is_instance_of::<PyString>() {
        config.extract()?
    } else if config.is_instance_of::<PyDict>() {
        py.import("json")?.call_method1("dumps", (config,))?.extract()?
    } else {
        return Err(PyValueError::new_err("config must be a JSON string or a dict"));
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("config: {e}")))
}

/// Runs a CLI command (`inspect`, `conjugate`, `verify`, `strauss`, `lions`,
/// `solve`) on a run configuration and returns `{"passed", "result"}`.
#[pyfunction]
#[pyo3(signature = (command, config=None))]
fn run<'py>(py: Python<'py>, command: &str, config: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyDict>> {
    let kind: CommandKind = serde_json::from_value(serde_json::Value::String(command.to_owned()))
        .map_err(|_| PyValueError::new_err(format!("unknown command: {command}")))?;
    let mut cfg = run_config(py, config)?;
    cfg.solver.grid = cfg.grid;
    let out = execute(kind, &cfg).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("passed", out.passed)?;
    d.set_item("result", json_to_py(py, &out.result)?)?;
    Ok(d)
}

/// Mountain-pass ground state of `−div(a(|u'|)u') + V a(|u|)u = coef·|u|^{q−2}u`
/// with `V = 1`. Returns the level, residual and profile.
#[pyfunction]
#[pyo3(signature = (a, q, dim=3, r_max=20.0, cells=4000, tol=1e-6, coef=1.0))]
#[allow(clippy::too_many_arguments)]
fn solve<'py>(
    py: Python<'py>,
    a: &PyNFunction,
    q: f64,
    dim: usize,
    r_max: f64,
    cells: usize,
    tol: f64,
    coef: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = GridConfig {
        dim,
        r_max,
        cells,
        spacing: Spacing::Uniform,
    };
    let cfg = SolverConfig {
        tol,
        grid,
        ..SolverConfig::default()
    };
    let nonlin = NonlinearitySpec::PurePower { q, coef };
    let problem = ProblemSpec::new(a.inner.clone(), PotentialSpec::default(), nonlin, grid.build().map_err(py_err)?)
        .map_err(py_err)?;
    let rep = mountain_pass_solve(&problem, &cfg).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("c", rep.c)?;
    d.set_item("residual_norm", rep.residual_norm)?;
    d.set_item("u_at_origin", rep.u_at_origin)?;
    d.set_item("iterations", rep.iterations)?;
    d.set_item("newton_steps", rep.newton_steps)?;
    d.set_item("converged", rep.converged)?;
    d.set_item("path_energies", rep.path_energies.clone())?;
    d.set_item("r", rep.u.grid().nodes().to_vec())?;
    d.set_item("u", rep.u.values().to_vec())?;
    Ok(d)
}

#[pymodule]
fn orlicz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNFunction>()?;
    m.add_class::<PySobolevConjugate>()?;
    m.add_class::<PyRadialGrid>()?;
    m.add_function(wrap_pyfunction!(modular, m)?)?;
    m.add_function(wrap_pyfunction!(luxemburg_norm, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
