//! Python bindings. Structured values cross the boundary as JSON text in the
//! same formats the command line reads and writes.

use coarse_chains::coeffs::format_rational;
use coarse_chains::equivariant::{torus_homology as torus, transport_fundamental_class};
use coarse_chains::geometry::FlatPair;
use coarse_chains::io::{self, AnyChain};
use coarse_chains::scenario::{self, Scenario};
use coarse_chains::spaces::{LatticeSpace, NetSpec, Window};
use coarse_chains::verify::{run_suite, Mutation, SuiteConfig};
use coarse_chains::wrongway::WrongWayContext;
use coarse_chains::{coeffs, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

create_exception!(coarse_chains, ChainError, PyValueError);

/// Errors carry the same JSON object the command line prints on stderr.
fn err(e: Error) -> PyErr {
    ChainError::new_err(scenario::error_json(&e).to_string())
}

fn parse(text: &str) -> PyResult<Value> {
    io::parse_json(text).map_err(err)
}

fn context(chain: &AnyChain, n: usize, q: usize, perturb: bool, orientation: i64) -> PyResult<WrongWayContext> {
    let pair = FlatPair::new(n, q).map_err(err)?.with_orientation(orientation);
    chain.context(pair, perturb).map_err(err)
}

#[pyclass(name = "Chain", module = "coarse_chains", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyChain(AnyChain);

#[pymethods]
impl PyChain {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        AnyChain::from_json(&parse(text)?).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        io::to_canonical_string(&self.0.to_json())
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.space().dim()
    }

    #[getter]
    fn group(&self) -> &'static str {
        self.0.group().tag()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn propagation(&self) -> i64 {
        self.0.propagation()
    }

    /// Exact norms as `"p/q"` strings.
    fn sup_norm(&self) -> String {
        format_rational(&self.0.sup_norm())
    }

    fn uf_norm(&self, n: u32) -> String {
        format_rational(&self.0.uf_norm(n))
    }

    fn support(&self) -> Vec<Vec<Vec<i64>>> {
        self.0.support()
    }

    fn boundary(&self) -> PyResult<Self> {
        self.0.boundary().map(Self).map_err(err)
    }

    #[pyo3(signature = (n, q, perturb = false, orientation = 1))]
    fn wrong_way(&self, n: usize, q: usize, perturb: bool, orientation: i64) -> PyResult<Self> {
        let ctx = context(&self.0, n, q, perturb, orientation)?;
        self.0.wrong_way(&ctx).map(Self).map_err(err)
    }

    #[pyo3(signature = (n, q, perturb = false, orientation = 1))]
    fn sign_identity_residual(&self, n: usize, q: usize, perturb: bool, orientation: i64) -> PyResult<Self> {
        let ctx = context(&self.0, n, q, perturb, orientation)?;
        self.0.sign_identity_residual(&ctx).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Chain(degree={}, group={}, terms={})", self.0.degree(), self.0.group().tag(), self.0.len())
    }
}

/// Lattice points of `Z^dim` within sup distance `r` of `center`.
#[pyfunction]
fn ball(center: Vec<i64>, r: u32) -> PyResult<Vec<Vec<i64>>> {
    let space = LatticeSpace::new(center.len()).map_err(err)?;
    space.ball(&center, r).map_err(err)
}

/// Greedy net of the window `[lo, hi]` with the given separation (`"p/q"`).
#[pyfunction]
fn greedy_net(lo: Vec<i64>, hi: Vec<i64>, separation: &str) -> PyResult<Vec<Vec<i64>>> {
    let space = LatticeSpace::new(lo.len()).map_err(err)?;
    let window = Window::new(lo, hi).map_err(err)?;
    let spec = NetSpec::new(coeffs::parse_rational(separation).map_err(err)?, window).map_err(err)?;
    space.greedy_net(&spec).map_err(err)
}

/// Betti numbers and torsion of `T^n` as a JSON list of reports.
#[pyfunction]
#[pyo3(signature = (n, r_max = 1))]
fn torus_homology(n: usize, r_max: i64) -> PyResult<String> {
    let (_, reports) = torus(n, r_max).map_err(err)?;
    Ok(serde_json::to_string(&reports).expect("reports serialize"))
}

/// Class of the transported fundamental cycle in `H_{n-q}(T^{n-q})`.
#[pyfunction]
#[pyo3(signature = (n, q, orientation = 1, radius = 1, r_max = 1))]
fn transport_class(n: usize, q: usize, orientation: i64, radius: i64, r_max: i64) -> PyResult<Vec<i64>> {
    let pair = FlatPair::new(n, q).map_err(err)?.with_orientation(orientation);
    Ok(transport_fundamental_class(pair, radius, r_max).map_err(err)?.class)
}

/// Runs the seeded invariant suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (seed = None, mutation = None))]
fn verify(py: Python<'_>, seed: Option<u64>, mutation: Option<&str>) -> PyResult<String> {
    let mut cfg = SuiteConfig::default();
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.mutation = mutation.map(str::parse::<Mutation>).transpose().map_err(err)?;
    let report = py.detach(|| run_suite(&cfg));
    Ok(io::to_canonical_string(&report.to_json()))
}

/// Runs a bundled scenario by name, or a scenario given as JSON text.
#[pyfunction]
fn run_scenario(py: Python<'_>, scenario: &str) -> PyResult<String> {
    let text = scenario::bundled(scenario).unwrap_or(scenario);
    let s = Scenario::from_json(&parse(text)?, None).map_err(err)?;
    let report = py.detach(|| s.run()).map_err(err)?;
    Ok(io::to_canonical_string(&report))
}

#[pymodule]
#[pyo3(name = "coarse_chains")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChain>()?;
    m.add("ChainError", m.py().get_type::<ChainError>())?;
    m.add("BUNDLED_SCENARIOS", scenario::BUNDLED.to_vec())?;
    m.add_function(wrap_pyfunction!(ball, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_net, m)?)?;
    m.add_function(wrap_pyfunction!(torus_homology, m)?)?;
    m.add_function(wrap_pyfunction!(transport_class, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
