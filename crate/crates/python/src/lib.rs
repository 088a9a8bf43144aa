//! Python bindings.

use cauchy_dichotomy as core;
use cauchy_dichotomy::dichotomy::{self, Embedding, ParamSequencePair, TailDeclaration};
use cauchy_dichotomy::montecarlo::{self, SimulationConfig};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::ResourceCap { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Cauchy law with the given location and scale, viewed as a point of the
/// upper half-plane.
#[pyclass(name = "UHPoint", frozen, eq, from_py_object, module = "pycauchy")]
#[derive(Clone, Copy, PartialEq)]
struct PyUHPoint(core::UHPoint);

#[pymethods]
impl PyUHPoint {
    #[new]
    fn new(location: f64, scale: f64) -> PyResult<Self> {
        core::UHPoint::new(location, scale).map(Self).map_err(err)
    }

    #[getter]
    fn location(&self) -> f64 {
        self.0.location()
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.0.scale()
    }

    fn __repr__(&self) -> String {
        format!("UHPoint({:?}, {:?})", self.0.location(), self.0.scale())
    }
}

/// Element of SL(2,R) acting by fractional linear transformations.
#[pyclass(name = "MoebiusMap", frozen, from_py_object, module = "pycauchy")]
#[derive(Clone, Copy)]
struct PyMoebiusMap(core::MoebiusMap);

#[pymethods]
impl PyMoebiusMap {
    /// Requires ad - bc = 1; use `normalized` for any positive determinant.
    #[new]
    fn new(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        core::MoebiusMap::new(a, b, c, d).map(Self).map_err(err)
    }

    #[staticmethod]
    fn normalized(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        core::MoebiusMap::normalized(a, b, c, d).map(Self).map_err(err)
    }

    #[staticmethod]
    fn translation(shift: f64) -> Self {
        Self(core::MoebiusMap::translation(shift))
    }

    #[staticmethod]
    fn dilation(factor: f64) -> PyResult<Self> {
        core::MoebiusMap::dilation(factor).map(Self).map_err(err)
    }

    #[staticmethod]
    fn rotation(theta: f64) -> Self {
        Self(core::MoebiusMap::rotation(theta))
    }

    fn entries(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.0.entries();
        (a, b, c, d)
    }

    fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    fn act(&self, z: PyUHPoint) -> PyUHPoint {
        PyUHPoint(self.0.act(z.0))
    }

    fn act_pair(&self, z: PyUHPoint, w: PyUHPoint) -> (PyUHPoint, PyUHPoint) {
        let (a, b) = self.0.act_pair(z.0, w.0);
        (PyUHPoint(a), PyUHPoint(b))
    }

    fn compose(&self, other: PyMoebiusMap) -> Self {
        Self(self.0.compose(&other.0))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.0.entries();
        format!("MoebiusMap({a:?}, {b:?}, {c:?}, {d:?})")
    }
}

#[pyfunction]
fn chi(z: PyUHPoint, w: PyUHPoint) -> f64 {
    core::chi(z.0, w.0)
}

#[pyfunction]
fn kl_divergence(z: PyUHPoint, w: PyUHPoint) -> f64 {
    core::kl_divergence(z.0, w.0)
}

#[pyfunction]
fn hellinger_affinity(z: PyUHPoint, w: PyUHPoint) -> f64 {
    core::hellinger_affinity(z.0, w.0)
}

#[pyfunction]
fn kakutani_term(z: PyUHPoint, w: PyUHPoint) -> f64 {
    core::kakutani_term(z.0, w.0)
}

#[pyfunction]
fn affinity_from_chi(t: f64) -> PyResult<f64> {
    core::affinity_from_chi(t).map_err(err)
}

#[pyfunction]
fn canonical_lambda(t: f64) -> PyResult<f64> {
    core::canonical_lambda(t).map_err(err)
}

#[pyfunction]
fn log_ratio_bound(c1: f64) -> PyResult<f64> {
    core::log_ratio_bound(c1).map_err(err)
}

/// ln(p_w(x) / p_z(x)).
#[pyfunction]
fn log_density_ratio(z: PyUHPoint, w: PyUHPoint, x: f64) -> f64 {
    core::log_density_ratio(z.0, w.0, x)
}

#[pyfunction]
fn cauchy_pdf(z: PyUHPoint, x: f64) -> f64 {
    core::cauchy_pdf(z.0, x)
}

/// Returns `(lambda, A)` with A sending (z, w) to (lambda*i, i).
#[pyfunction]
fn reduce_to_canonical(z: PyUHPoint, w: PyUHPoint) -> (f64, PyMoebiusMap) {
    let cf = core::reduce_to_canonical(z.0, w.0);
    (cf.lambda, PyMoebiusMap(cf.map))
}

fn family(kind: &str, c: f64, p: Option<f64>, r: Option<f64>) -> PyResult<ParamSequencePair> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| PyValueError::new_err(format!("{kind} needs `{name}`")));
    match kind {
        "power_law" => ParamSequencePair::power_law(c, need(p, "p")?),
        "geometric" => ParamSequencePair::geometric(c, need(r, "r")?),
        "constant" => ParamSequencePair::constant(c),
        other => return Err(PyValueError::new_err(format!("unknown family kind `{other}`"))),
    }
    .map_err(err)
}

fn embedding(name: &str) -> PyResult<Embedding> {
    match name {
        "location" => Ok(Embedding::Location),
        "scale" => Ok(Embedding::Scale),
        other => Err(PyValueError::new_err(format!("unknown embedding `{other}`"))),
    }
}

fn report_dict<'py>(py: Python<'py>, r: &dichotomy::DichotomyReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("verdict", r.verdict.to_string())?;
    d.set_item("basis", r.basis.to_string())?;
    d.set_item("suggested", r.suggested.map(|v| v.to_string()))?;
    d.set_item("terms_evaluated", r.terms_evaluated)?;
    d.set_item("chi_sum", r.chi_sum)?;
    d.set_item("kakutani_sum", r.kakutani_sum)?;
    d.set_item("sup_chi", r.sup_chi)?;
    d.set_item("chi_bounded", r.chi_bounded)?;
    d.set_item("chain_violations", r.chain_violations)?;
    Ok(d)
}

/// Classifies a named family: "power_law" (c n^-p), "geometric"
/// (c r^(n-1)) or "constant" (c).
#[pyfunction]
#[pyo3(signature = (kind, c, p=None, r=None, n_max=dichotomy::DEFAULT_N_MAX))]
fn classify_family<'py>(
    py: Python<'py>,
    kind: &str,
    c: f64,
    p: Option<f64>,
    r: Option<f64>,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let seq = family(kind, c, p, r)?;
    let report = py.detach(|| core::classify(&seq, n_max)).map_err(err)?;
    report_dict(py, &report)
}

/// Classifies explicit (z_n, w_n) pairs. With `observed_prefix=True` the
/// pairs are taken as the start of an unknown infinite sequence.
#[pyfunction]
#[pyo3(signature = (pairs, observed_prefix=false, n_max=dichotomy::DEFAULT_N_MAX))]
fn classify_pairs<'py>(
    py: Python<'py>,
    pairs: Vec<(PyUHPoint, PyUHPoint)>,
    observed_prefix: bool,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let tail = if observed_prefix {
        TailDeclaration::FamilyContinues
    } else {
        TailDeclaration::EqualAfterN
    };
    let seq = ParamSequencePair::from_pairs(pairs.into_iter().map(|(z, w)| (z.0, w.0)).collect(), tail);
    let report = core::classify(&seq, n_max).map_err(err)?;
    report_dict(py, &report)
}

/// Simulates S_N = sum ln(dP_w/dP_z)(X_n), X_n ~ P_w, for a family.
/// Returns checkpoints, per-trial paths and summary statistics.
#[pyfunction]
#[pyo3(signature = (kind, c, p=None, r=None, embedding="location", trials=montecarlo::DEFAULT_TRIALS, horizon=montecarlo::DEFAULT_HORIZON, seed=montecarlo::DEFAULT_SEED))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    kind: &str,
    c: f64,
    p: Option<f64>,
    r: Option<f64>,
    embedding: &str,
    trials: usize,
    horizon: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let seq = family(kind, c, p, r)?;
    let emb = self::embedding(embedding)?;
    let cfg = SimulationConfig {
        trials,
        horizon,
        seed,
        ..Default::default()
    };
    if trials as u128 * horizon as u128 > cfg.evaluation_cap {
        return Err(err(core::Error::ResourceCap {
            requested: trials as u128 * horizon as u128,
            cap: cfg.evaluation_cap,
        }));
    }
    let batch = py
        .detach(|| {
            let pairs = seq.concrete_pairs(horizon, emb)?;
            montecarlo::simulate_log_ratios(&pairs, &cfg)
        })
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("checkpoints", &batch.checkpoints)?;
    d.set_item("paths", &batch.log_ratio_paths)?;
    d.set_item("max_abs_increment", batch.max_abs_increment)?;
    d.set_item("medians", batch.summary.iter().map(|s| s.median).collect::<Vec<_>>())?;
    d.set_item("mean_exp", batch.summary.iter().map(|s| s.mean_exp).collect::<Vec<_>>())?;
    d.set_item(
        "mean_exp_neg",
        batch.summary.iter().map(|s| s.mean_exp_neg).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

#[pymodule]
fn pycauchy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyUHPoint>()?;
    m.add_class::<PyMoebiusMap>()?;
    m.add_function(wrap_pyfunction!(chi, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(hellinger_affinity, m)?)?;
    m.add_function(wrap_pyfunction!(kakutani_term, m)?)?;
    m.add_function(wrap_pyfunction!(affinity_from_chi, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(log_ratio_bound, m)?)?;
    m.add_function(wrap_pyfunction!(log_density_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_pdf, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_to_canonical, m)?)?;
    m.add_function(wrap_pyfunction!(classify_family, m)?)?;
    m.add_function(wrap_pyfunction!(classify_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
