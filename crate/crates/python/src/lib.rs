//! Python bindings. Bodies are wrapped as `Body`; reports come back as
//! plain dicts decoded from the same JSON the CLI writes.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use minkgeo::body::{parse_body, BodySpec};
use minkgeo::checks::{run_suite, Suite};
use minkgeo::metric::{metric_from_norm, pathological};
use minkgeo::norm::norm_from_body;
use minkgeo::report::to_json;
use minkgeo::svg::{render_svg, Ball, RenderOptions};
use minkgeo::{differential, ellipsoid, projective, ConvexBody, SamplingPlan};

create_exception!(minkgeo_py, MinkgeoError, PyValueError);

fn err(e: minkgeo::Error) -> PyErr {
    MinkgeoError::new_err(format!("{}: {e}", e.kind()))
}

/// Decodes a report into Python objects via the stdlib `json` module.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, report: &T) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (to_json(report),))
}

#[pyclass(name = "Body", module = "minkgeo_py", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyBody {
    inner: ConvexBody,
}

impl PyBody {
    fn from_spec(spec: BodySpec) -> PyResult<Self> {
        ConvexBody::from_spec(&spec).map(|inner| Self { inner }).map_err(err)
    }
}

#[pymethods]
impl PyBody {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_body(text).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn hpolytope(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> PyResult<Self> {
        Self::from_spec(BodySpec::Hpolytope { normals, offsets })
    }

    #[staticmethod]
    #[pyo3(signature = (vertices, rays = Vec::new()))]
    fn vpolytope(vertices: Vec<Vec<f64>>, rays: Vec<Vec<f64>>) -> PyResult<Self> {
        Self::from_spec(BodySpec::Vpolytope { vertices, rays })
    }

    #[staticmethod]
    fn ellipsoid(shape: Vec<Vec<f64>>) -> PyResult<Self> {
        Self::from_spec(BodySpec::Ellipsoid { shape })
    }

    #[staticmethod]
    fn lp_ball(p: f64, semiaxes: Vec<f64>) -> PyResult<Self> {
        Self::from_spec(BodySpec::LpBall { p, semiaxes })
    }

    #[staticmethod]
    fn unit_cube(n: usize) -> Self {
        Self {
            inner: ConvexBody::unit_cube(n),
        }
    }

    #[staticmethod]
    fn unit_ball(n: usize) -> Self {
        Self {
            inner: ConvexBody::unit_ball(n),
        }
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn gauge(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.try_gauge(&x).map_err(err)
    }

    /// Largest `t` with `base + t·dir` in the body; `inf` along recession rays.
    fn ray_boundary(&self, base: Vec<f64>, dir: Vec<f64>) -> PyResult<f64> {
        self.inner.ray_boundary(&base, &dir).map_err(err)
    }

    fn recession_ray(&self) -> PyResult<Option<Vec<f64>>> {
        self.inner.recession_ray().map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_spec()).expect("body specs serialize")
    }

    fn __repr__(&self) -> String {
        format!("Body({})", self.to_json())
    }
}

#[pyfunction]
fn minkowski_distance(body: &PyBody, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    projective::minkowski_ratio_distance(&body.inner, &x, &y).map_err(err)
}

#[pyfunction]
fn funk_distance(body: &PyBody, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    projective::funk_distance(&body.inner, &x, &y).map_err(err)
}

#[pyfunction]
fn hilbert_distance(body: &PyBody, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    projective::hilbert_distance(&body.inner, &x, &y).map_err(err)
}

#[pyfunction]
fn log_cross_ratio(body: &PyBody, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    projective::log_cross_ratio(&body.inner, &x, &y).map_err(err)
}

#[pyfunction]
fn simplex_hilbert(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    projective::simplex_hilbert(&x, &y).map_err(err)
}

#[pyfunction]
fn variation_seminorm(v: Vec<f64>) -> f64 {
    projective::variation_seminorm(&v)
}

#[pyfunction]
fn compare<'py>(py: Python<'py>, body: &PyBody, x: Vec<f64>, y: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let row = projective::compare_pair(&body.inner, &x, &y).map_err(err)?;
    to_py(py, &row)
}

#[pyfunction]
#[pyo3(signature = (body, seed = 0, samples = 1000))]
fn classify<'py>(py: Python<'py>, body: &PyBody, seed: u64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    let norm = norm_from_body(body.inner.clone());
    let class = py
        .detach(|| norm.classify(&SamplingPlan::new(seed, samples)))
        .map_err(err)?;
    to_py(py, &class)
}

/// Runs a property suite on the body's Minkowski, Funk or Hilbert metric.
#[pyfunction]
#[pyo3(signature = (body, suite, metric = None, seed = 0, samples = 1000))]
fn check<'py>(
    py: Python<'py>,
    body: &PyBody,
    suite: &str,
    metric: Option<&str>,
    seed: u64,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let metric = metric.unwrap_or(if suite == Suite::Funk { "funk" } else { "minkowski" });
    let oracle = match metric {
        "minkowski" => metric_from_norm(&norm_from_body(body.inner.clone())),
        "funk" => projective::funk_oracle(&body.inner),
        "reverse_funk" => projective::reverse_funk_oracle(&body.inner),
        "hilbert" => projective::hilbert_oracle(&body.inner),
        other => return Err(PyValueError::new_err(format!("unknown metric `{other}`"))),
    };
    let report = py
        .detach(|| run_suite(&oracle, suite, &SamplingPlan::new(seed, samples)))
        .map_err(err)?;
    to_py(py, &report)
}

/// Runs a property suite on a named counterexample metric on ℝⁿ.
#[pyfunction]
#[pyo3(signature = (name, suite, alpha = None, dim = 2, seed = 0, samples = 1000))]
fn check_pathological<'py>(
    py: Python<'py>,
    name: &str,
    suite: &str,
    alpha: Option<f64>,
    dim: usize,
    seed: u64,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(err)?;
    let oracle = pathological(name, alpha, dim).map_err(err)?;
    let report = py
        .detach(|| run_suite(&oracle, suite, &SamplingPlan::new(seed, samples)))
        .map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (body, y, step = None))]
fn fundamental_tensor<'py>(py: Python<'py>, body: &PyBody, y: Vec<f64>, step: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let norm = norm_from_body(body.inner.clone());
    let t = differential::fundamental_tensor(&norm, &y, step).map_err(err)?;
    to_py(py, &t)
}

#[pyfunction]
#[pyo3(signature = (body, seed = 0, samples = 1000))]
fn classify_convexity<'py>(py: Python<'py>, body: &PyBody, seed: u64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    let class = py
        .detach(|| differential::classify_convexity(&body.inner, &SamplingPlan::new(seed, samples)))
        .map_err(err)?;
    to_py(py, &class)
}

#[pyfunction]
#[pyo3(signature = (points, eps = ellipsoid::DEFAULT_MVEE_EPS))]
fn mvee<'py>(py: Python<'py>, points: Vec<Vec<f64>>, eps: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| ellipsoid::mvee(&points, eps)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (body, seed = 0, samples = 1000))]
fn is_euclidean<'py>(py: Python<'py>, body: &PyBody, seed: u64, samples: usize) -> PyResult<Bound<'py, PyAny>> {
    let norm = norm_from_body(body.inner.clone());
    let fit = py
        .detach(|| ellipsoid::is_euclidean(&norm, &SamplingPlan::new(seed, samples)))
        .map_err(err)?;
    to_py(py, &fit)
}

/// SVG of a planar body; balls are `(cx, cy, r)` triples.
#[pyfunction]
#[pyo3(signature = (body, resolution = minkgeo::svg::DEFAULT_RESOLUTION, indicatrix = true, funk_ball = None, hilbert_ball = None))]
fn render(
    body: &PyBody,
    resolution: usize,
    indicatrix: bool,
    funk_ball: Option<(f64, f64, f64)>,
    hilbert_ball: Option<(f64, f64, f64)>,
) -> PyResult<String> {
    let ball = |b: Option<(f64, f64, f64)>| {
        b.map(|(cx, cy, r)| Ball {
            center: vec![cx, cy],
            radius: r,
        })
    };
    let opts = RenderOptions {
        resolution,
        indicatrix,
        funk_ball: ball(funk_ball),
        hilbert_ball: ball(hilbert_ball),
    };
    render_svg(&body.inner, &opts).map_err(err)
}

#[pymodule]
pub fn minkgeo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MinkgeoError", m.py().get_type::<MinkgeoError>())?;
    m.add_class::<PyBody>()?;
    m.add_function(wrap_pyfunction!(minkowski_distance, m)?)?;
    m.add_function(wrap_pyfunction!(funk_distance, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_distance, m)?)?;
    m.add_function(wrap_pyfunction!(log_cross_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(simplex_hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(variation_seminorm, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(check_pathological, m)?)?;
    m.add_function(wrap_pyfunction!(fundamental_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(classify_convexity, m)?)?;
    m.add_function(wrap_pyfunction!(mvee, m)?)?;
    m.add_function(wrap_pyfunction!(is_euclidean, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    Ok(())
}
