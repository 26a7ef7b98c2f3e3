//! Python module `mmcut_py`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use mmcut::error::Error;
use mmcut::graph::{Graph, Measure, Partition};
use mmcut::pipeline::{run_minmax_cut, run_minmax_kpart, run_minmax_multiway, CapChoice, PipelineConfig, PipelineOutput};
use mmcut::rng::stream;
use mmcut::sse::{sse_round_part1, Backend, GuessGrid, SseInstance};

fn err(e: Error) -> PyErr {
    match e {
        Error::Input(_) | Error::Capacity(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(err)
}

fn config(backend_name: &str, eps: f64, seed: u64, doubling: bool) -> PyResult<PipelineConfig> {
    let mut cfg = PipelineConfig::new(backend(backend_name)?, eps, seed);
    if doubling {
        cfg.rounding.guess_grid = GuessGrid::Doubling;
    }
    Ok(cfg)
}

/// Undirected weighted graph on vertices `0..n`.
#[pyclass(name = "Graph", frozen)]
struct PyGraph {
    inner: Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges))]
    fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        Ok(PyGraph { inner: Graph::new(n, edges).map_err(err)? })
    }

    /// Parses edge-list text; returns the graph and the vertex labels.
    #[staticmethod]
    fn from_edgelist(text: &str) -> PyResult<(PyGraph, Vec<String>)> {
        let g = mmcut::io::parse_edgelist(text).map_err(err)?;
        Ok((PyGraph { inner: g.graph }, g.labels))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().to_vec()
    }

    fn cut(&self, set: Vec<usize>) -> PyResult<f64> {
        mmcut::graph::cut_weight(&self.inner, &set).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

fn partition_result<'py>(py: Python<'py>, out: &PipelineOutput) -> PyResult<(Vec<Vec<usize>>, Bound<'py, PyAny>)> {
    Ok((out.partition.parts.clone(), json_to_py(py, &out.report)?))
}

/// Min-max k-partition; returns `(parts, report)`.
#[pyfunction]
#[pyo3(signature = (graph, k, backend="exact", eps=0.2, seed=0, doubling=false))]
fn minmax_kpart<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    k: usize,
    backend: &str,
    eps: f64,
    seed: u64,
    doubling: bool,
) -> PyResult<(Vec<Vec<usize>>, Bound<'py, PyAny>)> {
    let out = run_minmax_kpart(&graph.inner, k, &config(backend, eps, seed, doubling)?, None).map_err(err)?;
    partition_result(py, &out)
}

/// Min-max multiway cut; returns `(parts, report)`.
#[pyfunction]
#[pyo3(signature = (graph, terminals, backend="exact", eps=0.2, seed=0, doubling=false))]
fn minmax_multiway<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    terminals: Vec<usize>,
    backend: &str,
    eps: f64,
    seed: u64,
    doubling: bool,
) -> PyResult<(Vec<Vec<usize>>, Bound<'py, PyAny>)> {
    let out =
        run_minmax_multiway(&graph.inner, &terminals, &config(backend, eps, seed, doubling)?, None).map_err(err)?;
    partition_result(py, &out)
}

/// Min-Max Cut with terminal sets. Caps `(c, d)` are swept when absent.
#[pyfunction]
#[pyo3(signature = (graph, terminal_sets, k, rho, caps=None, backend="exact", eps=0.2, seed=0, doubling=false))]
#[allow(clippy::too_many_arguments)]
fn minmax_cut<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    terminal_sets: Vec<Vec<usize>>,
    k: usize,
    rho: f64,
    caps: Option<(f64, f64)>,
    backend: &str,
    eps: f64,
    seed: u64,
    doubling: bool,
) -> PyResult<(Vec<Vec<usize>>, Bound<'py, PyAny>)> {
    let caps = match caps {
        Some((c, d)) => CapChoice::Given { c, d },
        None => CapChoice::Sweep,
    };
    let cfg = config(backend, eps, seed, doubling)?;
    let out = run_minmax_cut(&graph.inner, &terminal_sets, k, rho, caps, &cfg, None).map_err(err)?;
    partition_result(py, &out)
}

/// Small-set expansion with uniform measures; returns the solution as a dict.
#[pyfunction]
#[pyo3(signature = (graph, rho, backend="exact", eps=0.2, seed=0))]
fn small_set_expansion<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    rho: f64,
    backend: &str,
    eps: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let u = Measure::uniform(graph.inner.n());
    let inst = SseInstance::new(&graph.inner, &u, &u, rho, eps).map_err(err)?;
    let cfg = mmcut::sse::RoundingConfig::default();
    let sol = sse_round_part1(&inst, self::backend(backend)?, &cfg, &mut stream(seed, "separator")).map_err(err)?;
    json_to_py(py, &sol)
}

/// Exhaustive min-max k-partition with parts of at most `cap` vertices.
#[pyfunction]
#[pyo3(signature = (graph, k, cap=None))]
fn exact_minmax_kpart(graph: &PyGraph, k: usize, cap: Option<usize>) -> PyResult<(Vec<Vec<usize>>, f64)> {
    let cap = cap.unwrap_or_else(|| graph.inner.n().div_ceil(k.max(1)));
    let s = mmcut::oracle::exact_minmax_kpart(&graph.inner, k, cap).map_err(err)?;
    Ok((s.partition.parts, s.value))
}

/// Exhaustive min-max multiway cut.
#[pyfunction]
fn exact_multiway(graph: &PyGraph, terminals: Vec<usize>) -> PyResult<(Vec<Vec<usize>>, f64)> {
    let s = mmcut::oracle::exact_multiway(&graph.inner, &terminals).map_err(err)?;
    Ok((s.partition.parts, s.value))
}

/// Largest cut and largest part of a partition.
#[pyfunction]
fn evaluate(graph: &PyGraph, parts: Vec<Vec<usize>>) -> PyResult<(f64, usize)> {
    let p = Partition::from_parts(graph.inner.n(), parts).map_err(err)?;
    Ok((p.max_cut(&graph.inner), p.max_size()))
}

/// Star integrality-gap report for `k` terminals.
#[pyfunction]
fn star_gap(py: Python<'_>, k: usize) -> PyResult<Bound<'_, PyAny>> {
    json_to_py(py, &mmcut::instances::verify_multiway_sdp_gap(k).map_err(err)?)
}

/// Lower-bound tree on which greedy peeling is a factor `k` worse.
#[pyfunction]
fn greedy_bad_tree(k: usize) -> PyResult<PyGraph> {
    Ok(PyGraph { inner: mmcut::instances::gen_greedy_bad_tree(k).map_err(err)? })
}

#[pymodule]
fn mmcut_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(minmax_kpart, m)?)?;
    m.add_function(wrap_pyfunction!(minmax_multiway, m)?)?;
    m.add_function(wrap_pyfunction!(minmax_cut, m)?)?;
    m.add_function(wrap_pyfunction!(small_set_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(exact_minmax_kpart, m)?)?;
    m.add_function(wrap_pyfunction!(exact_multiway, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(star_gap, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_bad_tree, m)?)?;
    Ok(())
}
