//! Python bindings for `pbit-anneal`.
//!
//! ```python
//! import pbit_anneal_py as pa
//! g = pa.MaxCutGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
//! r = pa.run_anneal(g.to_ising(), "tapsa", cycles=200, seed=1)
//! print(r.final_cut)
//! ```

use pyo3::exceptions::{PyIOError, PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pbit_anneal::rng::TrialKey;
use pbit_anneal::{
    Algorithm, AlgorithmConfig, AnnealSchedule, BestKnownRegistry, Engine, Error, ExperimentSpec,
    ExperimentSummary, GsetFile, IsingModel, MaxCutGraph, SpinState, TrialResult, VariabilityConfig,
    VariabilityProfile,
};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Schedule(_) | Error::Parse { .. } => PyValueError::new_err(e.to_string()),
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        Error::UnknownGraph(_) => PyKeyError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn spins(values: Vec<i8>) -> PyResult<SpinState> {
    SpinState::new(values).map_err(to_py)
}

fn parse_algo(name: &str, alpha: usize, p_stall: f64) -> PyResult<AlgorithmConfig> {
    let kind: Algorithm = name.parse().map_err(to_py)?;
    let cfg = AlgorithmConfig::new(kind).with_alpha(alpha).with_p_stall(p_stall);
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

#[pyclass(name = "IsingModel", frozen)]
struct PyIsingModel {
    inner: IsingModel,
}

#[pymethods]
impl PyIsingModel {
    /// `h` is the bias vector; `couplings` holds `(i, j, J_ij)` with `i != j`.
    #[new]
    fn new(h: Vec<f64>, couplings: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        Ok(Self {
            inner: IsingModel::new(h, couplings).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_couplings(&self) -> usize {
        self.inner.edges().len()
    }

    fn energy(&self, state: Vec<i8>) -> PyResult<f64> {
        self.inner.energy(&spins(state)?).map_err(to_py)
    }

    /// Cut weight with edge weights `-J_ij`.
    fn cut_weight(&self, state: Vec<i8>) -> PyResult<f64> {
        self.inner.cut_weight(&spins(state)?).map_err(to_py)
    }

    fn schedule(&self, cycles: usize, t_res: u32) -> PyResult<PyAnnealSchedule> {
        derive(&self.inner, cycles, t_res)
    }

    fn __repr__(&self) -> String {
        format!("IsingModel(n={}, couplings={})", self.inner.n(), self.inner.edges().len())
    }
}

#[pyclass(name = "MaxCutGraph", frozen)]
struct PyMaxCutGraph {
    inner: MaxCutGraph,
}

#[pymethods]
impl PyMaxCutGraph {
    /// 0-based `(i, j, w)` edges.
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize, i64)>) -> PyResult<Self> {
        Ok(Self {
            inner: MaxCutGraph::new(n, edges).map_err(to_py)?,
        })
    }

    /// Reads a G-set file (1-based indices on disk).
    #[staticmethod]
    fn from_gset(path: &str) -> PyResult<Self> {
        let file = GsetFile::open(path).map_err(to_py)?;
        Ok(Self {
            inner: file.to_graph().map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.edges().len()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize, i64)> {
        self.inner.edges().to_vec()
    }

    fn total_weight(&self) -> i64 {
        self.inner.total_weight()
    }

    fn cut_value(&self, state: Vec<i8>) -> PyResult<i64> {
        self.inner.cut_value(&spins(state)?).map_err(to_py)
    }

    fn to_ising(&self) -> PyIsingModel {
        PyIsingModel {
            inner: self.inner.to_ising(),
        }
    }

    fn __repr__(&self) -> String {
        format!("MaxCutGraph(n={}, m={})", self.inner.n(), self.inner.edges().len())
    }
}

#[pyclass(name = "AnnealSchedule", frozen, get_all)]
struct PyAnnealSchedule {
    i0_min: f64,
    i0_max: f64,
    beta: f64,
    cycles: usize,
    t_res: u32,
}

#[pymethods]
impl PyAnnealSchedule {
    fn i0_sequence(&self) -> PyResult<Vec<f64>> {
        let s = AnnealSchedule::new(self.i0_min, self.i0_max, self.cycles, self.t_res).map_err(to_py)?;
        Ok(s.i0_sequence())
    }

    fn __repr__(&self) -> String {
        format!(
            "AnnealSchedule(i0_min={}, i0_max={}, beta={}, cycles={})",
            self.i0_min, self.i0_max, self.beta, self.cycles
        )
    }
}

fn derive(model: &IsingModel, cycles: usize, t_res: u32) -> PyResult<PyAnnealSchedule> {
    let s = pbit_anneal::derive_schedule(model, cycles, t_res).map_err(to_py)?;
    Ok(PyAnnealSchedule {
        i0_min: s.i0_min,
        i0_max: s.i0_max,
        beta: s.beta,
        cycles: s.cycles,
        t_res: s.t_res,
    })
}

#[pyclass(name = "TrialResult", frozen, get_all)]
struct PyTrialResult {
    final_cut: f64,
    final_energy: f64,
    best_cut: f64,
    updates: u64,
    final_state: Vec<i8>,
    /// `(cycle, i0, energy, cut)` per cycle.
    trace: Vec<(usize, f64, f64, f64)>,
}

impl From<&TrialResult> for PyTrialResult {
    fn from(r: &TrialResult) -> Self {
        Self {
            final_cut: r.final_cut,
            final_energy: r.final_energy,
            best_cut: r.best_cut,
            updates: r.updates,
            final_state: r.final_state.as_slice().to_vec(),
            trace: r.trace.iter().map(|t| (t.cycle, t.i0, t.energy, t.cut)).collect(),
        }
    }
}

#[pyclass(name = "ExperimentSummary", frozen, get_all)]
struct PyExperimentSummary {
    graph: String,
    algo: String,
    trials: usize,
    mean_cut: f64,
    std_cut: f64,
    std_error: f64,
    normalized_mean_cut: Option<f64>,
    mean_final_energy: f64,
    mean_best_cut: f64,
    anneal_seconds: f64,
    final_cuts: Vec<f64>,
}

impl From<&ExperimentSummary> for PyExperimentSummary {
    fn from(s: &ExperimentSummary) -> Self {
        Self {
            graph: s.spec.graph.clone(),
            algo: s.spec.algo.kind.name().to_string(),
            trials: s.spec.trials,
            mean_cut: s.stats.mean_cut,
            std_cut: s.stats.std_cut,
            std_error: s.std_error(),
            normalized_mean_cut: s.stats.normalized_mean_cut,
            mean_final_energy: s.stats.mean_final_energy,
            mean_best_cut: s.stats.mean_best_cut,
            anneal_seconds: s.anneal_seconds,
            final_cuts: s.results.iter().map(|r| r.final_cut).collect(),
        }
    }
}

#[pymethods]
impl PyExperimentSummary {
    fn __repr__(&self) -> String {
        format!(
            "ExperimentSummary(graph={:?}, algo={:?}, trials={}, mean_cut={}, std_cut={})",
            self.graph, self.algo, self.trials, self.mean_cut, self.std_cut
        )
    }
}

/// Derives the annealing schedule for `model`.
#[pyfunction]
#[pyo3(signature = (model, cycles=1000, t_res=10))]
fn derive_schedule(model: PyRef<'_, PyIsingModel>, cycles: usize, t_res: u32) -> PyResult<PyAnnealSchedule> {
    derive(&model.inner, cycles, t_res)
}

/// One anneal with a device realisation drawn from `seed`.
#[pyfunction]
#[pyo3(signature = (
    model, algo="tapsa", cycles=1000, seed=0,
    sigma_lambda=0.0, sigma_delta=0.0, sigma_nu=0.0, t_res=10, alpha=4, p_stall=0.5,
))]
#[allow(clippy::too_many_arguments)]
fn run_anneal(
    py: Python<'_>,
    model: PyRef<'_, PyIsingModel>,
    algo: &str,
    cycles: usize,
    seed: u64,
    sigma_lambda: f64,
    sigma_delta: f64,
    sigma_nu: f64,
    t_res: u32,
    alpha: usize,
    p_stall: f64,
) -> PyResult<PyTrialResult> {
    let algo = parse_algo(algo, alpha, p_stall)?;
    let var = VariabilityConfig::new(sigma_lambda, sigma_delta, sigma_nu, t_res).map_err(to_py)?;
    let model = &model.inner;
    let result = py.detach(|| -> pbit_anneal::Result<TrialResult> {
        let schedule = pbit_anneal::derive_schedule(model, cycles, t_res)?;
        let profile: VariabilityProfile = pbit_anneal::sample_variability(&var, model.n(), TrialKey::new(seed))?;
        pbit_anneal::run_anneal(model, &schedule, &algo, &profile, seed)
    });
    Ok(PyTrialResult::from(&result.map_err(to_py)?))
}

/// `(lambda, delta, period)` lists for `n` devices.
#[pyfunction]
#[pyo3(signature = (n, seed=0, sigma_lambda=0.0, sigma_delta=0.0, sigma_nu=0.0, t_res=10))]
fn sample_variability(
    n: usize,
    seed: u64,
    sigma_lambda: f64,
    sigma_delta: f64,
    sigma_nu: f64,
    t_res: u32,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<u32>)> {
    let var = VariabilityConfig::new(sigma_lambda, sigma_delta, sigma_nu, t_res).map_err(to_py)?;
    let p = pbit_anneal::sample_variability(&var, n, TrialKey::new(seed)).map_err(to_py)?;
    Ok((p.lambda, p.delta, p.period))
}

/// `sgn(r + tanh(lambda * (input + delta)))`, with ties resolving to +1.
#[pyfunction]
#[pyo3(signature = (input, r, lambda_=1.0, delta=0.0))]
fn pbit_update(input: f64, r: f64, lambda_: f64, delta: f64) -> i8 {
    pbit_anneal::pbit_update(input, r, lambda_, delta)
}

/// Named graphs and seeded trial batches.
#[pyclass(name = "Engine")]
struct PyEngine {
    inner: Engine,
}

#[pymethods]
impl PyEngine {
    #[new]
    fn new() -> Self {
        Self { inner: Engine::new() }
    }

    #[pyo3(signature = (name, graph, best_known=None))]
    fn add_graph(&mut self, name: &str, graph: PyRef<'_, PyMaxCutGraph>, best_known: Option<u64>) {
        self.inner.add_graph(name, graph.inner.clone(), best_known);
    }

    /// Loads a G-set file; returns the graph name (the file stem).
    #[pyo3(signature = (path, registry=None))]
    fn add_gset(&mut self, path: &str, registry: Option<&str>) -> PyResult<String> {
        let file = GsetFile::open(path).map_err(to_py)?;
        let registry = registry.map(BestKnownRegistry::open).transpose().map_err(to_py)?;
        self.inner.add_gset(&file, registry.as_ref()).map_err(to_py)?;
        Ok(file.name)
    }

    #[pyo3(signature = (
        graph, algo="tapsa", cycles=1000, trials=100, seed=0,
        sigma_lambda=0.0, sigma_delta=0.0, sigma_nu=0.0, t_res=10, alpha=4, p_stall=0.5,
        threads=0, fixed_variability=false,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn run_trials(
        &self,
        py: Python<'_>,
        graph: &str,
        algo: &str,
        cycles: usize,
        trials: usize,
        seed: u64,
        sigma_lambda: f64,
        sigma_delta: f64,
        sigma_nu: f64,
        t_res: u32,
        alpha: usize,
        p_stall: f64,
        threads: usize,
        fixed_variability: bool,
    ) -> PyResult<PyExperimentSummary> {
        let mut spec = ExperimentSpec::new(graph, parse_algo(algo, alpha, p_stall)?);
        spec.variability = VariabilityConfig::new(sigma_lambda, sigma_delta, sigma_nu, t_res).map_err(to_py)?;
        spec.cycles = cycles;
        spec.trials = trials;
        spec.base_seed = seed;
        spec.threads = threads;
        spec.resample_variability = !fixed_variability;
        let engine = &self.inner;
        let summary = py.detach(|| engine.run_trials(&spec)).map_err(to_py)?;
        Ok(PyExperimentSummary::from(&summary))
    }
}

#[pymodule]
fn pbit_anneal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIsingModel>()?;
    m.add_class::<PyMaxCutGraph>()?;
    m.add_class::<PyAnnealSchedule>()?;
    m.add_class::<PyTrialResult>()?;
    m.add_class::<PyExperimentSummary>()?;
    m.add_class::<PyEngine>()?;
    m.add_function(wrap_pyfunction!(derive_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(run_anneal, m)?)?;
    m.add_function(wrap_pyfunction!(sample_variability, m)?)?;
    m.add_function(wrap_pyfunction!(pbit_update, m)?)?;
    Ok(())
}
