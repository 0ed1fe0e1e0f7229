//! Python bindings. Faces cross the boundary as strings like `"1,3 2,4"`
//! (`"-"` for the empty face); reports come back as dicts.

use kneser_morse_core::certify::{certify as run_certify, CertifyOptions};
use kneser_morse_core::complex::{face_cap_from_env, neighborhood_complex};
use kneser_morse_core::face::FaceSet;
use kneser_morse_core::homology::{betti_with, Ring};
use kneser_morse_core::kneser::{Family, GroundParam, Graph, Universe};
use kneser_morse_core::morse::{verify_matching as run_verify, Matching};
use kneser_morse_core::pipeline::{collapse_s_to_sg_with, global_matching as run_global, BettiCheck};
use kneser_morse_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::{json, Value};

create_exception!(kneser_morse, CapExceededError, PyRuntimeError);
create_exception!(kneser_morse, CheckFailedError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::CapExceeded { .. } => CapExceededError::new_err(e.to_string()),
        Error::Domain(_) | Error::Parse { .. } | Error::MalformedMatching(_) => PyValueError::new_err(e.to_string()),
        _ => CheckFailedError::new_err(e.to_string()),
    }
}

fn to_dict<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn graph(k: u32, family: &str) -> PyResult<Graph> {
    let family: Family = family.parse().map_err(to_py)?;
    Ok(Graph::family(GroundParam::new(k).map_err(to_py)?, family))
}

fn cap_or_env(cap: Option<u64>) -> u64 {
    cap.unwrap_or_else(face_cap_from_env)
}

fn parse_faces(u: &Universe, faces: &[String]) -> PyResult<FaceSet> {
    faces.iter().map(|s| u.parse_face(s)).collect::<Result<FaceSet, Error>>().map_err(to_py)
}

fn ring(name: &str) -> PyResult<Ring> {
    name.parse().map_err(to_py)
}

/// Edges of `KG(2,k)`, `SG(2,k)` or `S(2,k)` as pairs of vertex labels.
#[pyfunction]
fn graph_edges(k: u32, family: &str) -> PyResult<Vec<(String, String)>> {
    Ok(graph(k, family)?.edges().into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect())
}

/// All faces of the neighborhood complex, empty face first.
#[pyfunction]
#[pyo3(signature = (k, family, cap=None))]
fn faces(k: u32, family: &str, cap: Option<u64>) -> PyResult<Vec<String>> {
    let g = graph(k, family)?;
    let fs = neighborhood_complex(&g).map_err(to_py)?.enumerate_faces(true, cap_or_env(cap)).map_err(to_py)?;
    Ok(fs.iter().map(|f| g.universe().format_face(f)).collect())
}

/// Betti numbers of the neighborhood complex of a graph family.
#[pyfunction]
#[pyo3(signature = (k, family, ring="gf2", reduced=true, cap=None))]
fn betti<'py>(
    py: Python<'py>,
    k: u32,
    family: &str,
    ring: &str,
    reduced: bool,
    cap: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let g = graph(k, family)?;
    let fs = neighborhood_complex(&g).map_err(to_py)?.enumerate_faces(true, cap_or_env(cap)).map_err(to_py)?;
    let b = betti_with(fs.faces(), self::ring(ring)?, reduced).map_err(to_py)?;
    to_dict(py, &b.to_json())
}

/// Betti numbers of an explicit face list over the vertices of `KG(2,k)`.
#[pyfunction]
#[pyo3(signature = (k, faces, ring="gf2", reduced=true))]
fn betti_of_faces<'py>(
    py: Python<'py>,
    k: u32,
    faces: Vec<String>,
    ring: &str,
    reduced: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let u = Universe::for_k(k).map_err(to_py)?;
    let fs = parse_faces(&u, &faces)?;
    let b = betti_with(fs.faces(), self::ring(ring)?, reduced).map_err(to_py)?;
    to_dict(py, &b.to_json())
}

/// Morse report for `pairs` (lower, upper) on the face list.
#[pyfunction]
fn verify_matching<'py>(
    py: Python<'py>,
    k: u32,
    faces: Vec<String>,
    pairs: Vec<(String, String)>,
) -> PyResult<Bound<'py, PyAny>> {
    let u = Universe::for_k(k).map_err(to_py)?;
    let fs = parse_faces(&u, &faces)?;
    let m: Matching = pairs
        .iter()
        .map(|(d, up)| Ok((u.parse_face(d)?, u.parse_face(up)?)))
        .collect::<Result<Matching, Error>>()
        .map_err(to_py)?;
    let r = run_verify(&fs, &m).map_err(to_py)?;
    to_dict(py, &r.to_json(Some(&u)))
}

/// Collapses `N(S)` onto `N(SG)`; `betti` is "off", "stage" or "step".
#[pyfunction]
#[pyo3(signature = (k, betti="stage", cap=None))]
fn collapse<'py>(py: Python<'py>, k: u32, betti: &str, cap: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let check = match betti {
        "off" => BettiCheck::Off,
        "stage" => BettiCheck::PerStage,
        "step" => BettiCheck::PerStep,
        other => return Err(PyValueError::new_err(format!("unknown betti check {other:?}"))),
    };
    let c = py.detach(|| collapse_s_to_sg_with(k, check, cap_or_env(cap))).map_err(to_py)?;
    let residual: Vec<String> = c.trace.residual.iter().map(|f| c.universe.format_face(f)).collect();
    let v = json!({
        "k": k,
        "initial_faces": c.initial.len(),
        "elementary_collapses": c.trace.steps.len(),
        "stages": c.stages.len(),
        "betti_preserved": c.all_betti_preserved(),
        "residual": residual,
    });
    to_dict(py, &v)
}

/// The global acyclic matching on `N(KG(2,k))`, summarized.
#[pyfunction]
fn global_matching<'py>(py: Python<'py>, k: u32) -> PyResult<Bound<'py, PyAny>> {
    let g = py.detach(|| run_global(k)).map_err(to_py)?;
    let strata: Vec<Value> = g
        .strata_critical
        .iter()
        .map(|(i, cells)| {
            let cells: Vec<String> = cells.iter().map(|&f| g.universe.format_face(f)).collect();
            json!({"i": i, "critical": cells})
        })
        .collect();
    let v = json!({
        "k": k,
        "acyclic": g.report.acyclic,
        "pairs": g.matching.len(),
        "strata_critical": g.strata_critical_count(),
        "strata": strata,
        "s_part_critical_by_dim": g.r_report.critical_counts(),
        "critical_by_dim": g.report.critical_counts(),
        "empty_face_paired": g.report.empty_face_paired,
    });
    to_dict(py, &v)
}

/// Full certificate for one `k`; the `pass` key says whether every check held.
#[pyfunction]
#[pyo3(signature = (k, cap=None))]
fn certify<'py>(py: Python<'py>, k: u32, cap: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let options = CertifyOptions::for_k(k, cap_or_env(cap));
    let r = py.detach(|| run_certify(k, options)).map_err(to_py)?;
    to_dict(py, &r.to_json())
}

#[pymodule]
fn kneser_morse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CapExceededError", m.py().get_type::<CapExceededError>())?;
    m.add("CheckFailedError", m.py().get_type::<CheckFailedError>())?;
    m.add_function(wrap_pyfunction!(graph_edges, m)?)?;
    m.add_function(wrap_pyfunction!(faces, m)?)?;
    m.add_function(wrap_pyfunction!(betti, m)?)?;
    m.add_function(wrap_pyfunction!(betti_of_faces, m)?)?;
    m.add_function(wrap_pyfunction!(verify_matching, m)?)?;
    m.add_function(wrap_pyfunction!(collapse, m)?)?;
    m.add_function(wrap_pyfunction!(global_matching, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}
