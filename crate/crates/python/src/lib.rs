//! Python module `snsim_py`: networks, metrics, growth simulation,
//! assessment and the experiment harness.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use snsim::assessment::{Assessor, IndexReport, Weights};
use snsim::experiment::{run_experiment as run_protocol, ExperimentConfig};
use snsim::metrics::global;
use snsim::metrics::local::{self, EnsembleConfig};
use snsim::optimizer::{self, Genome, ObjectivePoint};
use snsim::scoring::ScoringParams;
use snsim::simulator::{self, SimulationConfig};
use snsim::{AttributedNetwork, Error, NodeAttributes};

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } | Error::OutputExists(_) => PyOSError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

fn json_err(err: serde_json::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// An undirected simple graph over a fixed node set with per-node features.
#[pyclass(name = "Network", module = "snsim_py")]
struct PyNetwork {
    inner: AttributedNetwork,
}

#[pymethods]
impl PyNetwork {
    #[new]
    #[pyo3(signature = (nodes, edges = Vec::new(), features = None))]
    fn new(nodes: usize, edges: Vec<(usize, usize)>, features: Option<Vec<Vec<f64>>>) -> PyResult<Self> {
        let mut inner = AttributedNetwork::from_edges(nodes, &edges).map_err(to_py)?;
        if let Some(rows) = features {
            let attrs = rows
                .into_iter()
                .map(NodeAttributes::from_features)
                .collect::<snsim::Result<Vec<_>>>()
                .map_err(to_py)?;
            inner.set_attributes(attrs).map_err(to_py)?;
        }
        Ok(Self { inner })
    }

    /// The bundled Zachary karate club with its binary club feature.
    #[staticmethod]
    fn karate() -> Self {
        Self {
            inner: snsim::data::karate_club(),
        }
    }

    /// Parses edge-list text and an optional `node,feature...` CSV table.
    #[staticmethod]
    #[pyo3(signature = (edges, attributes = None, nodes = None))]
    fn parse(edges: &str, attributes: Option<&str>, nodes: Option<usize>) -> PyResult<Self> {
        let inner = snsim::load_network(edges, attributes, nodes).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees()
    }

    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.inner.has_edge(i, j)
    }

    fn add_edge(&mut self, i: usize, j: usize) -> PyResult<()> {
        self.inner.add_edge(i, j).map_err(to_py)
    }

    fn features(&self) -> Vec<Vec<f64>> {
        self.inner.attributes().iter().map(|a| a.features.clone()).collect()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn to_edge_list(&self) -> String {
        self.inner.to_edge_list()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

#[pyfunction]
fn density(net: &PyNetwork) -> PyResult<f64> {
    global::density(&net.inner).map_err(to_py)
}

#[pyfunction]
fn modularity(net: &PyNetwork) -> Option<f64> {
    global::modularity(&net.inner)
}

#[pyfunction]
fn assortativity(net: &PyNetwork) -> Option<f64> {
    global::degree_assortativity(&net.inner)
}

#[pyfunction]
fn degrees_summary(net: &PyNetwork) -> Option<(f64, f64, f64, f64)> {
    global::degree_distribution(&net.inner)
        .summary
        .map(|s| (s.mean, s.std, s.min, s.max))
}

#[pyfunction]
fn clustering(net: &PyNetwork) -> Vec<f64> {
    local::clustering_distribution(&net.inner).samples
}

/// Triangle counts by number of members whose first feature is 0.
#[pyfunction]
fn triad_census(net: &PyNetwork) -> PyResult<[u64; 4]> {
    local::triad_census(&net.inner).map(|c| c.counts).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (net, samples = 100, seed = 0))]
fn significance_profile(net: &PyNetwork, samples: usize, seed: u64) -> PyResult<[Option<f64>; 4]> {
    let z = local::triad_zscores(&net.inner, &EnsembleConfig { samples, seed }).map_err(to_py)?;
    Ok(local::significance_profile(z))
}

#[pyfunction]
fn edges_per_iteration(nodes: usize, rate: f64) -> PyResult<usize> {
    simulator::edges_per_iteration(nodes, rate).map_err(to_py)
}

/// Grows a network from `features` and returns one snapshot per iteration.
#[pyfunction]
#[pyo3(signature = (features, iterations = 8, edge_rate = 0.04, seed = 0, genome = None, scoring = None))]
fn simulate(
    features: Vec<Vec<f64>>,
    iterations: usize,
    edge_rate: f64,
    seed: u64,
    genome: Option<(Vec<i8>, Vec<f64>)>,
    scoring: Option<&str>,
) -> PyResult<Vec<PyNetwork>> {
    let width = features.first().map_or(0, Vec::len);
    let genome = match genome {
        Some((signs, weights)) => Genome::new(signs, weights).map_err(to_py)?,
        None => Genome::new(vec![1; width], vec![0.0; width]).map_err(to_py)?,
    };
    let mut config = SimulationConfig::new(genome.apply(&features).map_err(to_py)?);
    config.iterations = iterations;
    config.edge_rate = edge_rate;
    config.seed = seed;
    if let Some(text) = scoring {
        config.scoring = serde_json::from_str::<ScoringParams>(text).map_err(json_err)?;
    }
    let trace = simulator::run(&config).map_err(to_py)?;
    Ok(trace
        .snapshots
        .into_iter()
        .map(|s| PyNetwork { inner: s.network })
        .collect())
}

fn report_json(report: &IndexReport) -> PyResult<String> {
    serde_json::to_string(report).map_err(json_err)
}

/// Composite index of `sim` against `target` as a JSON string.
#[pyfunction]
#[pyo3(signature = (sim, target, samples = 100, seed = 0))]
fn assess(py: Python<'_>, sim: &PyNetwork, target: &PyNetwork, samples: usize, seed: u64) -> PyResult<String> {
    let (sim, target) = (sim.inner.clone(), target.inner.clone());
    let report = py
        .detach(move || {
            let assessor = Assessor::new(&target, None, EnsembleConfig { samples, seed }, Weights::default())?;
            assessor.assess(&sim)
        })
        .map_err(to_py)?;
    report_json(&report)
}

fn points(values: Vec<(f64, f64)>) -> Vec<ObjectivePoint> {
    values.into_iter().map(|(s, c)| ObjectivePoint::new(s, c)).collect()
}

/// Pareto fronts of `(similarity, cost)` points, both minimised.
#[pyfunction]
fn non_dominated_sort(values: Vec<(f64, f64)>) -> Vec<Vec<usize>> {
    optimizer::non_dominated_sort(&points(values))
}

#[pyfunction]
fn crowding_distance(values: Vec<(f64, f64)>) -> Vec<f64> {
    optimizer::crowding_distance(&points(values))
}

/// Runs the full protocol from a JSON configuration; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (config = None))]
fn run_experiment(py: Python<'_>, config: Option<&str>) -> PyResult<String> {
    let config = match config {
        Some(text) => ExperimentConfig::from_json(text).map_err(to_py)?,
        None => ExperimentConfig::default(),
    };
    let outcome = py.detach(move || run_protocol(&config)).map_err(to_py)?;
    serde_json::to_string(&outcome.report).map_err(json_err)
}

#[pymodule]
fn snsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(assortativity, m)?)?;
    m.add_function(wrap_pyfunction!(degrees_summary, m)?)?;
    m.add_function(wrap_pyfunction!(clustering, m)?)?;
    m.add_function(wrap_pyfunction!(triad_census, m)?)?;
    m.add_function(wrap_pyfunction!(significance_profile, m)?)?;
    m.add_function(wrap_pyfunction!(edges_per_iteration, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(assess, m)?)?;
    m.add_function(wrap_pyfunction!(non_dominated_sort, m)?)?;
    m.add_function(wrap_pyfunction!(crowding_distance, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
