//! Python bindings: samplers, cluster statistics and exact-engine values.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use loopsoup::cluster::{self, ClusterBuilder};
use loopsoup::exact::{self, ModelParams};
use loopsoup::harness::{self, ExperimentConfig};
use loopsoup::partition::Partition;
use loopsoup::rng::{seeded, SoupRng};
use loopsoup::sampler::{self, Loop, LoopConfig, DEFAULT_TAIL_EPSILON};

create_exception!(pyloopsoup, LoopSoupError, PyValueError);

fn err(e: loopsoup::Error) -> PyErr {
    LoopSoupError::new_err(e.to_string())
}

fn model(n: usize, kappa: f64, alpha: f64) -> PyResult<ModelParams> {
    ModelParams::new(n, kappa, alpha).map_err(err)
}

fn partition(n: usize, blocks: Vec<Vec<usize>>) -> PyResult<Partition> {
    Partition::from_blocks(n, blocks).map_err(err)
}

fn config_from_loops(loops: Vec<Vec<usize>>) -> PyResult<LoopConfig> {
    let loops = loops.into_iter().map(Loop::new).collect::<loopsoup::Result<Vec<_>>>().map_err(err)?;
    Ok(LoopConfig::new(loops))
}

/// Seeded sampler of loop soups on the complete graph K_n with killing kappa.
#[pyclass(name = "CompleteSampler", module = "pyloopsoup")]
struct PyCompleteSampler {
    inner: sampler::CompleteSampler,
    rng: SoupRng,
}

#[pymethods]
impl PyCompleteSampler {
    #[new]
    #[pyo3(signature = (n, kappa, alpha, seed = 0, tail_epsilon = DEFAULT_TAIL_EPSILON))]
    fn new(n: usize, kappa: f64, alpha: f64, seed: u64, tail_epsilon: f64) -> PyResult<Self> {
        let inner = sampler::CompleteSampler::new(model(n, kappa, alpha)?, tail_epsilon).map_err(err)?;
        Ok(Self { inner, rng: seeded(seed) })
    }

    /// Total mass of the loop measure.
    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    fn sample_length(&mut self) -> usize {
        self.inner.sample_length(&mut self.rng)
    }

    /// One loop in canonical rotation.
    fn sample_loop(&mut self) -> Vec<usize> {
        self.inner.sample_loop(&mut self.rng).into()
    }

    /// One soup as a list of loops.
    fn sample_soup(&mut self) -> Vec<Vec<usize>> {
        self.inner.sample_soup(&mut self.rng).loops().iter().map(|l| l.vertices().to_vec()).collect()
    }

    /// Cluster sizes of `count` independent soups, one sorted list per soup.
    fn cluster_sizes(&mut self, count: usize) -> Vec<Vec<usize>> {
        let mut builder = ClusterBuilder::new(self.inner.params().n);
        (0..count)
            .map(|_| {
                builder.reset();
                let inner = &self.inner;
                inner.for_each_loop(&mut self.rng, |w| builder.add_walk(w).expect("sampled vertices are in range"));
                let mut sizes = builder.cluster_sizes();
                sizes.sort_unstable_by(|a, b| b.cmp(a));
                sizes
            })
            .collect()
    }
}

/// Blocks of the cluster partition induced by `loops` on `n` vertices.
#[pyfunction]
fn clusters(loops: Vec<Vec<usize>>, n: usize) -> PyResult<Vec<Vec<usize>>> {
    let c = cluster::clusters(&config_from_loops(loops)?, n).map_err(err)?;
    Ok(c.partition.blocks().to_vec())
}

/// Map from cluster size to the number of clusters of that size.
#[pyfunction]
fn size_census(loops: Vec<Vec<usize>>, n: usize) -> PyResult<BTreeMap<usize, usize>> {
    let c = cluster::clusters(&config_from_loops(loops)?, n).map_err(err)?;
    Ok(cluster::size_census(&c).counts)
}

/// Primitive roots of the loops, de-duplicated and sorted.
#[pyfunction]
fn project_primitive(loops: Vec<Vec<usize>>) -> PyResult<Vec<Vec<usize>>> {
    let set = sampler::project_primitive(&config_from_loops(loops)?);
    Ok(set.into_iter().map(Vec::from).collect())
}

/// `(exact, approximate)` total mass of the loop measure.
#[pyfunction]
fn loop_mass(n: usize, kappa: f64) -> PyResult<(f64, f64)> {
    model(n, kappa, 1.0)?;
    let m = exact::loop_mass(n, kappa);
    Ok((m.exact, m.approximate))
}

#[pyfunction]
fn prob_finer(blocks: Vec<Vec<usize>>, n: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::prob_finer(&partition(n, blocks)?, &model(n, kappa, alpha)?).map_err(err)
}

#[pyfunction]
fn prob_exact(blocks: Vec<Vec<usize>>, n: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::prob_exact(&partition(n, blocks)?, &model(n, kappa, alpha)?).map_err(err)
}

#[pyfunction]
fn prob_connected(n: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::prob_connected(&model(n, kappa, alpha)?).map_err(err)
}

#[pyfunction]
fn factorial_moment_isolated_vertices(k: usize, n: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::factorial_moment_isolated_vertices(k, &model(n, kappa, alpha)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (d, k, n, kappa, alpha, precision_bits = 192))]
fn factorial_moment_size_d(d: usize, k: usize, n: usize, kappa: f64, alpha: f64, precision_bits: usize) -> PyResult<f64> {
    exact::factorial_moment_size_d(d, k, &model(n, kappa, alpha)?, precision_bits).map_err(err)
}

#[pyfunction]
fn cumulant_asymptotic_ratio(d: usize, n: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::cumulant_asymptotic_ratio(d, &model(n, kappa, alpha)?).map_err(err)
}

/// Moments and cumulants up to `upto` as decimal strings.
#[pyfunction]
#[pyo3(signature = (upto, n, kappa, alpha, precision_bits = None))]
fn moment_table(upto: usize, n: usize, kappa: f64, alpha: f64, precision_bits: Option<usize>) -> PyResult<String> {
    let m = model(n, kappa, alpha)?;
    let table = match precision_bits {
        Some(bits) => exact::MomentTable::new(upto, &m, bits),
        None => exact::MomentTable::auto(upto, &m),
    }
    .map_err(err)?;
    serde_json::to_string(&table).map_err(|e| err(e.into()))
}

#[pyfunction]
fn size_gf(theta: f64, n: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::size_gf(theta, &model(n, kappa, alpha)?).map_err(err)
}

#[pyfunction]
fn poisson_mixture_pmf(k: usize, d: usize, kappa: f64, alpha: f64) -> PyResult<f64> {
    exact::poisson_mixture_pmf(k, d, kappa, alpha).map_err(err)
}

#[pyfunction]
fn er_tree_factorial_moment(n: usize, c: f64, d: usize, k: usize) -> PyResult<f64> {
    loopsoup::er::er_tree_factorial_moment(n, c, d, k).map_err(err)
}

/// Runs an experiment from a JSON config and returns the JSON report.
#[pyfunction]
fn run_experiment(config_json: &str) -> PyResult<String> {
    let config: ExperimentConfig = serde_json::from_str(config_json).map_err(|e| err(e.into()))?;
    let report = harness::run(&config).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| err(e.into()))
}

#[pymodule]
fn pyloopsoup(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LoopSoupError", m.py().get_type::<LoopSoupError>())?;
    m.add_class::<PyCompleteSampler>()?;
    m.add_function(wrap_pyfunction!(clusters, m)?)?;
    m.add_function(wrap_pyfunction!(size_census, m)?)?;
    m.add_function(wrap_pyfunction!(project_primitive, m)?)?;
    m.add_function(wrap_pyfunction!(loop_mass, m)?)?;
    m.add_function(wrap_pyfunction!(prob_finer, m)?)?;
    m.add_function(wrap_pyfunction!(prob_exact, m)?)?;
    m.add_function(wrap_pyfunction!(prob_connected, m)?)?;
    m.add_function(wrap_pyfunction!(factorial_moment_isolated_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(factorial_moment_size_d, m)?)?;
    m.add_function(wrap_pyfunction!(cumulant_asymptotic_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(moment_table, m)?)?;
    m.add_function(wrap_pyfunction!(size_gf, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_mixture_pmf, m)?)?;
    m.add_function(wrap_pyfunction!(er_tree_factorial_moment, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
