//! Python bindings. Shapes and experiment configs cross the boundary as the
//! same JSON documents the CLI reads; points are `(x, y)` float tuples.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use larg_lab::dense_set::{PointSet, Window};
use larg_lab::experiments::{self, ExperimentConfig, SamplerKind, SamplerSpec};
use larg_lab::io::ShapeSpec;
use larg_lab::stepiso::{self, MapKind, PointMap};
use larg_lab::{larg, Error, Metric, NormShape, Polygon, Rational, Vec2};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Json(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn shape(json: &str) -> PyResult<NormShape> {
    let spec: ShapeSpec = serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    spec.norm_shape().map_err(err)
}

fn vec2(p: (f64, f64)) -> PyResult<Vec2<f64>> {
    Vec2::from_f64(p.0, p.1).ok_or_else(|| PyValueError::new_err("non-finite coordinate"))
}

fn point_set(points: Vec<(f64, f64)>) -> PyResult<PointSet<f64>> {
    let pts = points.into_iter().map(vec2).collect::<PyResult<Vec<_>>>()?;
    let (mut lo, mut hi) = ((f64::MAX, f64::MAX), (f64::MIN, f64::MIN));
    for p in &pts {
        lo = (lo.0.min(p.x), lo.1.min(p.y));
        hi = (hi.0.max(p.x), hi.1.max(p.y));
    }
    if pts.is_empty() {
        (lo, hi) = ((0.0, 0.0), (1.0, 1.0));
    }
    let window = Window::new(lo.0, lo.1, hi.0.max(lo.0 + 1.0), hi.1.max(lo.1 + 1.0)).map_err(err)?;
    PointSet::new(pts, window, 0).map_err(err)
}

/// Distance between two points under a shape given as JSON.
#[pyfunction]
fn distance(shape_json: &str, x: (f64, f64), y: (f64, f64)) -> PyResult<f64> {
    Ok(shape(shape_json)?.distance(&vec2(x)?, &vec2(y)?))
}

/// Poisson (or product) sample on `(x_min, y_min, x_max, y_max)`.
#[pyfunction]
#[pyo3(signature = (window, intensity, seed, sampler = "poisson"))]
fn sample_points(
    window: (f64, f64, f64, f64),
    intensity: f64,
    seed: u64,
    sampler: &str,
) -> PyResult<Vec<(f64, f64)>> {
    let kind = match sampler {
        "poisson" => SamplerKind::Poisson,
        "product" => SamplerKind::Product,
        other => return Err(PyValueError::new_err(format!("unknown sampler {other:?}"))),
    };
    let spec = SamplerSpec {
        kind,
        window: Window::new(window.0, window.1, window.2, window.3).map_err(err)?,
        intensity,
    };
    let ps: PointSet<f64> = spec.sample(seed).map_err(err)?;
    Ok(ps.points.iter().map(|p| (p.x, p.y)).collect())
}

/// Edge list of a LARG sample over `points`.
#[pyfunction]
#[pyo3(signature = (points, shape_json, p, seed, delta = 1.0))]
fn sample_larg(
    points: Vec<(f64, f64)>,
    shape_json: &str,
    p: f64,
    seed: u64,
    delta: f64,
) -> PyResult<Vec<(usize, usize)>> {
    let ps = point_set(points)?;
    let g = larg::sample_larg(&ps, &shape(shape_json)?, delta, p, seed).map_err(err)?;
    Ok(g.edges())
}

/// The explicit 1D step-isometry, evaluated exactly on a `"num/den"` string.
#[pyfunction]
fn explicit_step_isometry_1d(x: &str) -> PyResult<String> {
    let q = larg_lab::scalar::parse_rational(x).map_err(err)?;
    Ok(stepiso::explicit_step_isometry_1d(&q).to_string())
}

/// `None` when the map preserves truncated distances, else the first
/// offending pair `(i, j)`.
#[pyfunction]
fn step_isometry_witness(
    shape_json: &str,
    domain: Vec<(f64, f64)>,
    images: Vec<(f64, f64)>,
) -> PyResult<Option<(usize, usize)>> {
    let conv = |v: Vec<(f64, f64)>| v.into_iter().map(vec2).collect::<PyResult<Vec<_>>>();
    let map = PointMap::new(conv(domain)?, conv(images)?, MapKind::Arbitrary).map_err(err)?;
    let verdict = stepiso::is_step_isometry(&map, &shape(shape_json)?).map_err(err)?;
    Ok(verdict.witness().map(|w| (w.i, w.j)))
}

/// Rows of `T` for a box shape, so that box distances become sup-norm distances.
#[pyfunction]
fn box_to_linf_transform(generators: Vec<(String, String)>) -> PyResult<[[String; 2]; 2]> {
    let gens = generators
        .iter()
        .map(|(a, b)| {
            Ok(Vec2::new(
                larg_lab::scalar::parse_rational(a)?,
                larg_lab::scalar::parse_rational(b)?,
            ))
        })
        .collect::<Result<Vec<Vec2<Rational>>, Error>>()
        .map_err(err)?;
    let t = experiments::box_to_linf_transform(&Polygon::new(gens).map_err(err)?).map_err(err)?;
    let s = |x: &Rational| x.to_string();
    Ok([
        [s(&t.rows[0].x), s(&t.rows[0].y)],
        [s(&t.rows[1].x), s(&t.rows[1].y)],
    ])
}

#[pyfunction]
fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    experiments::wilson_interval(successes, trials)
}

fn config(json: &str) -> PyResult<ExperimentConfig> {
    serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Decay experiment; returns the CSV text.
#[pyfunction]
fn run_decay(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = config(config_json)?;
    let rows = py
        .detach(|| experiments::run_decay_experiment(&cfg))
        .map_err(err)?;
    let mut buf = Vec::new();
    experiments::write_rows(&mut buf, &rows).map_err(err)?;
    String::from_utf8(buf).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Box back-and-forth demo; returns the JSON report.
#[pyfunction]
fn run_box_demo(py: Python<'_>, config_json: &str) -> PyResult<String> {
    let cfg = config(config_json)?;
    let report = py
        .detach(|| experiments::box_isomorphism_demo(&cfg))
        .map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn larg_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(sample_points, m)?)?;
    m.add_function(wrap_pyfunction!(sample_larg, m)?)?;
    m.add_function(wrap_pyfunction!(explicit_step_isometry_1d, m)?)?;
    m.add_function(wrap_pyfunction!(step_isometry_witness, m)?)?;
    m.add_function(wrap_pyfunction!(box_to_linf_transform, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_interval, m)?)?;
    m.add_function(wrap_pyfunction!(run_decay, m)?)?;
    m.add_function(wrap_pyfunction!(run_box_demo, m)?)?;
    Ok(())
}
