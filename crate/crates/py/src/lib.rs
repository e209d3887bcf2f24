//! Python bindings. Results come back as plain dicts and lists.

use catspec::adiabatic::{evolve as evolve_ramp, RampSchedule, RampShape};
use catspec::field::gaussian::minimize_gaussian;
use catspec::field::grid::RadialGrid;
use catspec::field::thomas_fermi::{solve_thomas_fermi, tf_radius};
use catspec::twomode::exact::{build_hamiltonian, diagonalize, gap_ratio_sweep, ground_distribution as distribution, SweepAxis};
use catspec::twomode::meanfield::{cat_energies as cat, mean_field_branches as branches};
use catspec::variational::{ground_state, OrbitalAnsatz, OrbitalCoupling, VariationalOptions};
use catspec::{Error, LambdaConvention};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use pythonize::pythonize;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::DegenerateInteraction { .. } | Error::ZeroCoupling | Error::Config(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    pythonize(py, value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn convention(name: &str) -> PyResult<LambdaConvention> {
    LambdaConvention::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown convention {name:?}")))
}

/// Model parameters: atom number, intra- and inter-species couplings and
/// the laser coupling `lam`.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    inner: catspec::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (n_atoms, u0, u1, lam = 0.0, tilde = false))]
    fn new(n_atoms: usize, u0: f64, u1: f64, lam: f64, tilde: bool) -> PyResult<Self> {
        let inner = catspec::ModelParams::new(n_atoms, u0, u1, lam).map_err(err)?.with_tilde(tilde);
        Ok(PyModelParams { inner })
    }

    /// Copy with `lam` set from the dimensionless control parameter.
    #[pyo3(signature = (control, convention = "two_mode"))]
    fn at_control(&self, control: f64, convention: &str) -> PyResult<Self> {
        let inner = self.inner.at_control(control, self::convention(convention)?).map_err(err)?;
        Ok(PyModelParams { inner })
    }

    #[pyo3(signature = (convention = "two_mode"))]
    fn control(&self, convention: &str) -> PyResult<f64> {
        self.inner.control(self::convention(convention)?).map_err(err)
    }

    #[getter]
    fn n_atoms(&self) -> usize {
        self.inner.n_atoms
    }

    #[getter]
    fn u0(&self) -> f64 {
        self.inner.u0
    }

    #[getter]
    fn u1(&self) -> f64 {
        self.inner.u1
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn tilde(&self) -> bool {
        self.inner.apply_tilde_rescale
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("ModelParams(n_atoms={}, u0={}, u1={}, lam={}, tilde={})", p.n_atoms, p.u0, p.u1, p.lambda, if p.apply_tilde_rescale { "True" } else { "False" })
    }
}

/// `(diag, offdiag)` of the Fock-basis Hamiltonian, `m = 0..=N`.
#[pyfunction]
fn hamiltonian(params: &PyModelParams) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let h = build_hamiltonian(&params.inner).map_err(err)?;
    Ok((h.diag, h.offdiag))
}

/// Lowest `k` levels with parities, resolved pair splittings and optionally
/// the eigenvectors.
#[pyfunction]
#[pyo3(signature = (params, k = 4, vectors = false))]
fn spectrum<'py>(py: Python<'py>, params: &PyModelParams, k: usize, vectors: bool) -> PyResult<Bound<'py, PyAny>> {
    let h = build_hamiltonian(&params.inner).map_err(err)?;
    let spec = diagonalize(&h, k, vectors).map_err(err)?;
    to_py(py, &spec)
}

/// Ground-state occupation probabilities `p_m`.
#[pyfunction]
fn ground_distribution(params: &PyModelParams) -> PyResult<Vec<f64>> {
    let h = build_hamiltonian(&params.inner).map_err(err)?;
    let spec = diagonalize(&h, 1, true).map_err(err)?;
    Ok(distribution(&spec).map_err(err)?.probs)
}

/// Gap table over a grid of control values; failed rows carry an `error`.
#[pyfunction]
#[pyo3(signature = (params, grid, convention = "two_mode"))]
fn sweep<'py>(py: Python<'py>, params: &PyModelParams, grid: Vec<f64>, convention: &str) -> PyResult<Bound<'py, PyAny>> {
    let conv = self::convention(convention)?;
    let rows = py.detach(|| gap_ratio_sweep(&params.inner, &grid, SweepAxis::Control(conv)));
    to_py(py, &rows)
}

#[pyfunction]
fn mean_field_branches<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &branches(&params.inner).map_err(err)?)
}

/// Energies and splitting of the even/odd superpositions of the two
/// broken-symmetry branches.
#[pyfunction]
fn cat_energies<'py>(py: Python<'py>, params: &PyModelParams) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &cat(&params.inner).map_err(err)?)
}

/// Thomas-Fermi branches of the trapped field model (profiles omitted).
#[pyfunction]
#[pyo3(signature = (params, points = 2048, r_max = None))]
fn thomas_fermi<'py>(py: Python<'py>, params: &PyModelParams, points: usize, r_max: Option<f64>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let p = &params.inner;
    let (u0, u1) = p.mean_field_couplings();
    let r_max = r_max.unwrap_or_else(|| RadialGrid::for_cloud(tf_radius(p.n(), u0 + u1)).r_max);
    let grid = RadialGrid::new(points, r_max).map_err(err)?;
    let sols = solve_thomas_fermi(p, &grid).map_err(err)?;
    sols.iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("branch", s.branch.name())?;
            d.set_item("mu", s.mu)?;
            d.set_item("r1", s.r1)?;
            d.set_item("r2", s.r2)?;
            d.set_item("energy", s.energy)?;
            Ok(d)
        })
        .collect()
}

/// Best Gaussian-ansatz state of the field model.
#[pyfunction]
#[pyo3(signature = (params, restarts = 4))]
fn gaussian_minimum<'py>(py: Python<'py>, params: &PyModelParams, restarts: usize) -> PyResult<Bound<'py, PyAny>> {
    let m = py.detach(|| minimize_gaussian(&params.inner, restarts)).map_err(err)?;
    to_py(py, &m)
}

/// Ground state of the field-variational q-matrix model.
#[pyfunction]
#[pyo3(signature = (params, coupling = "2lambda", ansatz = "single"))]
fn variational_ground_state<'py>(py: Python<'py>, params: &PyModelParams, coupling: &str, ansatz: &str) -> PyResult<Bound<'py, PyAny>> {
    let coupling = OrbitalCoupling::parse(coupling).ok_or_else(|| PyValueError::new_err(format!("unknown coupling {coupling:?}")))?;
    let ansatz = match ansatz {
        "single" => OrbitalAnsatz::SingleGaussian,
        "two" => OrbitalAnsatz::TwoGaussian,
        other => return Err(PyValueError::new_err(format!("unknown ansatz {other:?}"))),
    };
    let opts = VariationalOptions {
        ansatz,
        coupling,
        ..Default::default()
    };
    let state = py.detach(|| ground_state(&params.inner, &opts)).map_err(err)?;
    to_py(py, &state)
}

/// Evolves the ground state at control `start` while the control is ramped
/// to `end` over `duration`; returns fidelity samples.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (params, start, end, duration, dt, samples = 100, shape = "linear"))]
fn evolve<'py>(py: Python<'py>, params: &PyModelParams, start: f64, end: f64, duration: f64, dt: f64, samples: usize, shape: &str) -> PyResult<Bound<'py, PyAny>> {
    let shape = RampShape::parse(shape).ok_or_else(|| PyValueError::new_err(format!("unknown ramp shape {shape:?}")))?;
    let ramp = RampSchedule::new(start, end, duration, shape).map_err(err)?;
    let rows = py.detach(|| evolve_ramp(&params.inner, &ramp, dt, samples)).map_err(err)?;
    to_py(py, &rows)
}

#[pymodule]
fn catspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(ground_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(mean_field_branches, m)?)?;
    m.add_function(wrap_pyfunction!(cat_energies, m)?)?;
    m.add_function(wrap_pyfunction!(thomas_fermi, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(variational_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    Ok(())
}
