//! Python bindings. Correlation vectors are passed as `(c1, c2, c3)` tuples.

use std::str::FromStr;

use bell_discord::decoherence::{self, ChannelKind, FlipChannel};
use bell_discord::isosurface::{self, ConvexityVerdict, ScalarFieldId, TriangleMesh};
use bell_discord::oracle::{self, MeasurementDirection};
use bell_discord::state::{self, BellSpectrum, CorrelationMatrix3, CLASSICAL_TOL};
use bell_discord::{measures, CorrelationMeasures, CorrelationVector, Error};
use nalgebra::{Complex, Matrix3};
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    bell_discord,
    UnphysicalStateError,
    PyValueError,
    "Correlation vector outside the tetrahedron."
);

type Triple = (f64, f64, f64);
type Rows = [[f64; 3]; 3];

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unphysical { .. } => UnphysicalStateError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn cv(c: Triple) -> CorrelationVector {
    CorrelationVector::new(c.0, c.1, c.2)
}

fn triple(c: CorrelationVector) -> Triple {
    (c.c1, c.c2, c.c3)
}

fn rows(m: &Matrix3<f64>) -> Rows {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

fn field(name: &str) -> PyResult<ScalarFieldId> {
    ScalarFieldId::from_str(name).map_err(py_err)
}

fn channel(name: &str) -> PyResult<ChannelKind> {
    ChannelKind::from_str(name).map_err(py_err)
}

#[pyclass(frozen, get_all, skip_from_py_object, name = "Measures", module = "bell_discord")]
#[derive(Clone)]
struct PyMeasures {
    mutual_info: f64,
    classical: f64,
    discord: f64,
    concurrence: f64,
    eof: f64,
    c_max: f64,
}

#[pymethods]
impl PyMeasures {
    fn __repr__(&self) -> String {
        format!(
            "Measures(mutual_info={}, classical={}, discord={}, concurrence={}, eof={}, c_max={})",
            self.mutual_info, self.classical, self.discord, self.concurrence, self.eof, self.c_max
        )
    }
}

impl From<CorrelationMeasures> for PyMeasures {
    fn from(m: CorrelationMeasures) -> Self {
        Self {
            mutual_info: m.mutual_info,
            classical: m.classical,
            discord: m.discord,
            concurrence: m.concurrence,
            eof: m.eof,
            c_max: m.c_max,
        }
    }
}

#[pyclass(frozen, get_all, name = "StateClass", module = "bell_discord")]
struct PyStateClass {
    physical: bool,
    separable: bool,
    classical: bool,
    dominant_vertex: (u8, u8),
}

#[pymethods]
impl PyStateClass {
    fn __repr__(&self) -> String {
        format!(
            "StateClass(physical={}, separable={}, classical={}, dominant_vertex={:?})",
            self.physical, self.separable, self.classical, self.dominant_vertex
        )
    }
}

#[pyclass(frozen, get_all, name = "OracleResult", module = "bell_discord")]
struct PyOracleResult {
    min_entropy: f64,
    argmin: Triple,
    evaluations: usize,
    refined: bool,
}

#[pymethods]
impl PyOracleResult {
    fn __repr__(&self) -> String {
        format!(
            "OracleResult(min_entropy={}, argmin={:?}, evaluations={})",
            self.min_entropy, self.argmin, self.evaluations
        )
    }
}

#[pyclass(
    frozen,
    get_all,
    skip_from_py_object,
    name = "TrajectoryEvent",
    module = "bell_discord"
)]
#[derive(Clone)]
struct PyTrajectoryEvent {
    kind: String,
    t: f64,
    c: Triple,
}

#[pymethods]
impl PyTrajectoryEvent {
    fn __repr__(&self) -> String {
        format!("TrajectoryEvent(kind={:?}, t={}, c={:?})", self.kind, self.t, self.c)
    }
}

fn py_events(events: &[decoherence::TrajectoryEvent]) -> Vec<PyTrajectoryEvent> {
    events
        .iter()
        .map(|e| PyTrajectoryEvent {
            kind: e.kind.to_string(),
            t: e.t,
            c: triple(e.c_at_event),
        })
        .collect()
}

#[pyclass(frozen, get_all, name = "Trajectory", module = "bell_discord")]
struct PyTrajectory {
    channel: String,
    gamma: f64,
    t: Vec<f64>,
    c: Vec<Triple>,
    measures: Vec<PyMeasures>,
    events: Vec<PyTrajectoryEvent>,
    reaches_axis: bool,
}

/// A level surface: vertices, triangles (0-based) and per-vertex residuals.
#[pyclass(frozen, name = "Mesh", module = "bell_discord")]
struct PyMesh(TriangleMesh);

#[pymethods]
impl PyMesh {
    #[getter]
    fn vertices(&self) -> Vec<[f64; 3]> {
        self.0.vertices.clone()
    }

    #[getter]
    fn triangles(&self) -> Vec<[usize; 3]> {
        self.0.triangles.clone()
    }

    #[getter]
    fn residuals(&self) -> Vec<f64> {
        self.0.residuals.clone()
    }

    #[getter]
    fn clipped(&self) -> Vec<bool> {
        self.0.clipped.clone()
    }

    fn max_residual(&self) -> f64 {
        self.0.max_residual()
    }

    fn max_axis_distance(&self) -> f64 {
        self.0.max_axis_distance()
    }

    fn connected_components(&self) -> usize {
        self.0.connected_components()
    }

    fn write_obj(&self, path: std::path::PathBuf) -> PyResult<()> {
        isosurface::export_obj(&self.0, path).map_err(py_err)
    }

    fn write_csv(&self, path: std::path::PathBuf) -> PyResult<()> {
        isosurface::export_csv(&self.0, path).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(vertices={}, triangles={})",
            self.0.vertices.len(),
            self.0.triangles.len()
        )
    }
}

#[pyclass(frozen, get_all, name = "ConvexityReport", module = "bell_discord")]
struct PyConvexityReport {
    field: String,
    verdict: String,
    /// `(x, y, gap)` for midpoints above the chord.
    violations_convex: Vec<(Triple, Triple, f64)>,
    /// `(x, y, gap)` for midpoints below the chord.
    violations_concave: Vec<(Triple, Triple, f64)>,
    trials: usize,
    seed: u64,
}

#[pyfunction]
fn spectrum(c: Triple) -> [f64; 4] {
    state::spectrum(cv(c)).lambda
}

#[pyfunction]
fn correlation_from_spectrum(lam: [f64; 4]) -> PyResult<Triple> {
    state::correlation_from_spectrum(&BellSpectrum { lambda: lam })
        .map(triple)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (c, tol = state::PHYSICAL_TOL))]
fn is_physical(c: Triple, tol: f64) -> bool {
    state::is_physical(cv(c), tol)
}

#[pyfunction]
fn is_separable(c: Triple) -> PyResult<bool> {
    state::is_separable(cv(c)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (c, tol = CLASSICAL_TOL))]
fn classify(c: Triple, tol: f64) -> PyStateClass {
    let s = state::classify(cv(c), tol);
    PyStateClass {
        physical: s.physical,
        separable: s.separable,
        classical: s.classical,
        dominant_vertex: (s.dominant_vertex.a, s.dominant_vertex.b),
    }
}

/// The 4×4 density matrix as nested lists of complex numbers.
#[pyfunction]
fn density_matrix(c: Triple) -> PyResult<Vec<Vec<Complex<f64>>>> {
    let rho = state::density_matrix(cv(c)).map_err(py_err)?;
    Ok((0..4).map(|i| (0..4).map(|j| rho.0[(i, j)]).collect()).collect())
}

/// Von Neumann entropy of the density matrix, in bits.
#[pyfunction]
fn von_neumann_entropy(c: Triple) -> PyResult<f64> {
    Ok(state::density_matrix(cv(c)).map_err(py_err)?.entropy())
}

/// Returns `(c, rot_a, rot_b)` with `t = rot_a · diag(c) · rot_bᵀ`.
#[pyfunction]
fn bell_diagonalize(t: Rows) -> PyResult<(Triple, Rows, Rows)> {
    let m = Matrix3::from_fn(|i, j| t[i][j]);
    let frame = state::bell_diagonalize(&CorrelationMatrix3(m)).map_err(py_err)?;
    Ok((triple(frame.c), rows(&frame.rot_a), rows(&frame.rot_b)))
}

#[pyfunction]
fn binary_entropy(p: f64) -> PyResult<f64> {
    measures::binary_entropy(p).map_err(py_err)
}

#[pyfunction]
fn mutual_information(c: Triple) -> PyResult<f64> {
    measures::mutual_information(cv(c)).map_err(py_err)
}

#[pyfunction]
fn classical_correlation(c: Triple) -> PyResult<f64> {
    measures::classical_correlation(cv(c)).map_err(py_err)
}

#[pyfunction]
fn discord(c: Triple) -> PyResult<f64> {
    measures::discord(cv(c)).map_err(py_err)
}

#[pyfunction]
fn concurrence(c: Triple) -> PyResult<f64> {
    measures::concurrence(cv(c)).map_err(py_err)
}

#[pyfunction]
fn entanglement_of_formation(c: Triple) -> PyResult<f64> {
    measures::entanglement_of_formation(cv(c)).map_err(py_err)
}

#[pyfunction]
fn all_measures(c: Triple) -> PyResult<PyMeasures> {
    bell_discord::all_measures(cv(c)).map(PyMeasures::from).map_err(py_err)
}

/// Conditional entropy of B after measuring qubit A along the unit vector `n`.
#[pyfunction]
fn conditional_entropy_for_direction(c: Triple, n: [f64; 3]) -> PyResult<f64> {
    let n = MeasurementDirection::new(n).map_err(py_err)?;
    oracle::conditional_entropy_for_direction(cv(c), n).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (c, grid = oracle::DEFAULT_GRID, refine = true))]
fn minimize_conditional_entropy(py: Python<'_>, c: Triple, grid: usize, refine: bool) -> PyResult<PyOracleResult> {
    let r = py
        .detach(|| oracle::minimize_conditional_entropy(cv(c), grid, refine))
        .map_err(py_err)?;
    let [x, y, z] = r.argmin.as_array();
    Ok(PyOracleResult {
        min_entropy: r.min_entropy,
        argmin: (x, y, z),
        evaluations: r.evaluations,
        refined: r.refined,
    })
}

#[pyfunction]
#[pyo3(signature = (c, trials, outcomes = 4, seed = 0))]
fn povm_sanity_scan(c: Triple, trials: usize, outcomes: usize, seed: u64) -> PyResult<f64> {
    oracle::povm_sanity_scan(cv(c), trials, outcomes, seed).map_err(py_err)
}

/// Applies a flip channel (`"phase"`, `"bit"` or `"bitphase"`) with scale factor `s`.
#[pyfunction]
fn apply_channel(c: Triple, kind: &str, scale: f64) -> PyResult<Triple> {
    let ch = FlipChannel::with_scale(channel(kind)?, scale).map_err(py_err)?;
    decoherence::apply_channel(cv(c), &ch).map(triple).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (c0, kind, gamma = 1.0, t_max = 3.0, steps = 101))]
fn simulate(c0: Triple, kind: &str, gamma: f64, t_max: f64, steps: usize) -> PyResult<PyTrajectory> {
    let run = decoherence::simulate(cv(c0), channel(kind)?, gamma, t_max, steps).map_err(py_err)?;
    Ok(PyTrajectory {
        channel: run.kind.to_string(),
        gamma: run.gamma,
        t: run.samples.iter().map(|s| s.t).collect(),
        c: run.samples.iter().map(|s| triple(s.c)).collect(),
        measures: run.samples.iter().map(|s| s.measures.into()).collect(),
        events: py_events(&run.events),
        reaches_axis: run.reaches_axis,
    })
}

#[pyfunction]
#[pyo3(signature = (c0, kind, gamma = 1.0))]
fn event_times(c0: Triple, kind: &str, gamma: f64) -> PyResult<Vec<PyTrajectoryEvent>> {
    let events = decoherence::analytic_event_times(cv(c0), channel(kind)?, gamma).map_err(py_err)?;
    Ok(py_events(&events))
}

/// Level surface of `field` (`discord`, `classical`, `mutual_info`, `concurrence`, `eof`).
#[pyfunction]
#[pyo3(signature = (field_name, level, resolution = isosurface::DEFAULT_RESOLUTION, refine_tol = isosurface::DEFAULT_REFINE_TOL))]
fn extract_level_surface(
    py: Python<'_>,
    field_name: &str,
    level: f64,
    resolution: usize,
    refine_tol: f64,
) -> PyResult<PyMesh> {
    let f = field(field_name)?;
    py.detach(|| isosurface::extract_level_surface(f, level, resolution, refine_tol))
        .map(PyMesh)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (field_name, trials, seed = 0, gap_tol = isosurface::CONVEXITY_GAP_TOL))]
fn convexity_witness(field_name: &str, trials: usize, seed: u64, gap_tol: f64) -> PyResult<PyConvexityReport> {
    let r = isosurface::convexity_witness_with_tol(field(field_name)?, trials, seed, gap_tol).map_err(py_err)?;
    let list = |v: &[isosurface::MidpointViolation]| v.iter().map(|m| (triple(m.x), triple(m.y), m.gap)).collect();
    let verdict = match r.verdict() {
        ConvexityVerdict::ConvexAndConcave => "convex_and_concave",
        ConvexityVerdict::ConvexConsistent => "convex_consistent",
        ConvexityVerdict::ConcaveConsistent => "concave_consistent",
        ConvexityVerdict::Neither => "neither",
    };
    Ok(PyConvexityReport {
        field: r.field.to_string(),
        verdict: verdict.to_string(),
        violations_convex: list(&r.violations_convex),
        violations_concave: list(&r.violations_concave),
        trials: r.trials,
        seed: r.seed,
    })
}

#[pymodule(name = "bell_discord")]
fn bell_discord_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UnphysicalStateError", m.py().get_type::<UnphysicalStateError>())?;
    m.add_class::<PyMeasures>()?;
    m.add_class::<PyStateClass>()?;
    m.add_class::<PyOracleResult>()?;
    m.add_class::<PyTrajectoryEvent>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyConvexityReport>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_from_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(is_physical, m)?)?;
    m.add_function(wrap_pyfunction!(is_separable, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(bell_diagonalize, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(classical_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(discord, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_of_formation, m)?)?;
    m.add_function(wrap_pyfunction!(all_measures, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_entropy_for_direction, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_conditional_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(povm_sanity_scan, m)?)?;
    m.add_function(wrap_pyfunction!(apply_channel, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(event_times, m)?)?;
    m.add_function(wrap_pyfunction!(extract_level_surface, m)?)?;
    m.add_function(wrap_pyfunction!(convexity_witness, m)?)?;
    Ok(())
}
