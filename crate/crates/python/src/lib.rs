//! Python bindings: layouts, diagrams, webs, the oracle checks and sampling.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pauliweb_core::export::{to_dot, to_tikz};
use pauliweb_core::oracle::deterministic_checks;
use pauliweb_core::sample::{sample as run_sample, InitError, PostSelect, SampleConfig};
use pauliweb_core::surface::{
    build_diagram, build_layout, layout_document, logical_operators, CircuitSpec,
    LayoutAnnotations, Scheme,
};
use pauliweb_core::verify::{verify as run_verify, VerifyConfig};
use pauliweb_core::web::{
    boundary_legs, detectors, solve, validate_web, web_space, BoundaryCondition, Solution,
};
use pauliweb_core::{zx, Error, PauliOperator};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scheme(name: &str) -> PyResult<Scheme> {
    name.parse().map_err(err)
}

fn spec(distance: usize, scheme_name: &str, rounds: usize) -> PyResult<CircuitSpec> {
    CircuitSpec::for_scheme(distance, scheme(scheme_name)?, rounds).map_err(err)
}

/// Layout document as JSON, annotated when a scheme is given.
#[pyfunction]
#[pyo3(signature = (distance, scheme=None))]
fn layout(distance: usize, scheme: Option<&str>) -> PyResult<String> {
    let l = build_layout(distance).map_err(err)?;
    Ok(match scheme {
        Some(name) => {
            let s = spec(distance, name, 1)?;
            let checks = deterministic_checks(&build_diagram(&s), false).map_err(err)?;
            layout_document(
                &l,
                Some(&LayoutAnnotations {
                    scheme: self::scheme(name)?,
                    init: s.init(),
                    deterministic_checks: &checks,
                }),
            )
        }
        None => layout_document(&l, None),
    })
}

/// `(Z_L, X_L, Y_L)` as signed Pauli strings.
#[pyfunction]
fn logicals(distance: usize) -> PyResult<(String, String, String)> {
    let l = logical_operators(&build_layout(distance).map_err(err)?);
    Ok((l.z.to_string(), l.x.to_string(), l.y.to_string()))
}

#[pyclass(name = "Web", module = "pauliweb", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyWeb {
    inner: pauliweb_core::web::Web,
    edges: Vec<(String, String)>,
}

#[pymethods]
impl PyWeb {
    /// Signed Pauli string on the boundary legs.
    #[getter]
    fn boundary(&self) -> String {
        self.inner.boundary_restriction().to_string()
    }

    #[getter]
    fn stubs(&self) -> Vec<String> {
        self.inner
            .stub_set()
            .iter()
            .map(|c| c.as_str().to_owned())
            .collect()
    }

    /// `(node, node, "X" | "Y" | "Z")` for every highlighted edge.
    fn highlights(&self) -> Vec<(String, String, String)> {
        self.inner
            .highlighted_edges()
            .into_iter()
            .map(|e| {
                let (a, b) = &self.edges[e];
                (
                    a.clone(),
                    b.clone(),
                    self.inner.highlight(e).symbol().to_owned(),
                )
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Web(boundary='{}', stubs={}, edges={})",
            self.boundary(),
            self.inner.stub_set().len(),
            self.inner.highlighted_edges().len()
        )
    }
}

#[pyclass(name = "Diagram", module = "pauliweb", frozen)]
struct PyDiagram {
    inner: zx::Diagram,
}

impl PyDiagram {
    fn wrap(&self, w: pauliweb_core::web::Web) -> PyWeb {
        let edges = self
            .inner
            .edges()
            .iter()
            .map(|e| (e.a.as_str().to_owned(), e.b.as_str().to_owned()))
            .collect();
        PyWeb { inner: w, edges }
    }

    fn own<'a>(&self, w: &'a PyWeb) -> PyResult<&'a pauliweb_core::web::Web> {
        if w.inner.belongs_to(&self.inner) {
            Ok(&w.inner)
        } else {
            Err(PyValueError::new_err("web belongs to a different diagram"))
        }
    }
}

#[pymethods]
impl PyDiagram {
    /// Diagram of a surface-code circuit.
    #[staticmethod]
    #[pyo3(signature = (distance, scheme="inject-y", rounds=1))]
    fn build(distance: usize, scheme: &str, rounds: usize) -> PyResult<Self> {
        Ok(PyDiagram {
            inner: build_diagram(&spec(distance, scheme, rounds)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDiagram {
            inner: zx::deserialize(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        zx::serialize(&self.inner)
    }

    #[pyo3(signature = (web=None))]
    fn to_dot(&self, web: Option<&PyWeb>) -> PyResult<String> {
        let w = web.map(|w| self.own(w)).transpose()?;
        to_dot(&self.inner, w).map_err(err)
    }

    #[pyo3(signature = (web=None))]
    fn to_tikz(&self, web: Option<&PyWeb>) -> PyResult<String> {
        let w = web.map(|w| self.own(w)).transpose()?;
        to_tikz(&self.inner, w).map_err(err)
    }

    #[getter]
    fn num_nodes(&self) -> usize {
        self.inner.nodes().len()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    /// Invariant violations, empty when valid.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn web_space_dimension(&self) -> usize {
        web_space(&self.inner).dimension()
    }

    /// The web with the given boundary operator; raises `ValueError` with a
    /// witness when none exists.
    fn solve(&self, operator: &str) -> PyResult<PyWeb> {
        let n = boundary_legs(&self.inner).len();
        let op = PauliOperator::parse(n, operator).map_err(err)?;
        let bc = BoundaryCondition::from_operator(&self.inner, &op).map_err(err)?;
        match solve(&self.inner, &bc).map_err(err)? {
            Solution::Web(w) => Ok(self.wrap(w)),
            Solution::Infeasible(witness) => Err(PyValueError::new_err(witness.to_string())),
        }
    }

    fn detectors(&self) -> Vec<PyWeb> {
        detectors(&self.inner)
            .into_iter()
            .map(|w| self.wrap(w))
            .collect()
    }

    /// Spiders whose rules `web` breaks.
    fn validate_web(&self, web: &PyWeb) -> PyResult<Vec<String>> {
        let w = self.own(web)?;
        Ok(validate_web(&self.inner, w)
            .map_err(err)?
            .iter()
            .map(|n| n.as_str().to_owned())
            .collect())
    }

    #[pyo3(signature = (all_rounds=false))]
    fn deterministic_checks(&self, all_rounds: bool) -> PyResult<Vec<String>> {
        Ok(deterministic_checks(&self.inner, all_rounds)
            .map_err(err)?
            .iter()
            .map(|c| c.as_str().to_owned())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Diagram(nodes={}, edges={})",
            self.inner.nodes().len(),
            self.inner.num_edges()
        )
    }
}

/// `(name, passed, detail)` for every cross-check.
#[pyfunction]
#[pyo3(signature = (distance, scheme="inject-y", rounds=1, seed=0, samples=200, exhaustive_errors=false))]
fn verify(
    distance: usize,
    scheme: &str,
    rounds: usize,
    seed: u64,
    samples: usize,
    exhaustive_errors: bool,
) -> PyResult<Vec<(String, bool, String)>> {
    let mut cfg = VerifyConfig::new(distance, rounds, self::scheme(scheme)?);
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.exhaustive_errors = exhaustive_errors;
    Ok(run_verify(&cfg)
        .map_err(err)?
        .into_iter()
        .map(|c| (c.name, c.passed, c.detail))
        .collect())
}

/// Shot rows `(shot, accepted, logical_y, n_errors)` and the JSON summary.
#[pyfunction]
#[pyo3(signature = (distance, scheme="inject-y", rounds=1, seed=0, shots=1000, p=0.0, errors=Vec::new(), postselect="figure-set", all_rounds=false))]
#[allow(clippy::too_many_arguments)]
fn sample(
    distance: usize,
    scheme: &str,
    rounds: usize,
    seed: u64,
    shots: u64,
    p: f64,
    errors: Vec<String>,
    postselect: &str,
    all_rounds: bool,
) -> PyResult<(Vec<(u64, bool, bool, usize)>, String)> {
    let mut cfg = SampleConfig::new(distance, rounds, self::scheme(scheme)?);
    cfg.seed = seed;
    cfg.shots = shots;
    cfg.error_rate = p;
    cfg.fixed = errors
        .iter()
        .map(|e| e.parse::<InitError>())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    cfg.postselect = postselect.parse::<PostSelect>().map_err(err)?;
    cfg.all_rounds = all_rounds;
    let res = run_sample(&cfg).map_err(err)?;
    let rows = res
        .rows
        .iter()
        .map(|r| (r.shot, r.accepted, r.logical_y, r.n_errors))
        .collect();
    Ok((rows, res.summary.to_json()))
}

#[pymodule]
fn pauliweb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDiagram>()?;
    m.add_class::<PyWeb>()?;
    m.add_function(wrap_pyfunction!(layout, m)?)?;
    m.add_function(wrap_pyfunction!(logicals, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    Ok(())
}
