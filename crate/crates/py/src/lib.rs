//! Python bindings.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use sslab_core::analysis::{self, Options};
use sslab_core::catalog::{self, CatalogEntry, Params};
use sslab_core::curv::{total_curvature_area, total_curvature_contour};
use sslab_core::ends::end_records;
use sslab_core::intersect::self_intersection_scan;
use sslab_core::locus::{fourpi_scan, scan, LocusFinding, Window};
use sslab_core::mesh::{export_mesh, sample_mesh, Projection};
use sslab_core::wdata::period_report;
use sslab_core::{suite, Config, Error, C64};
use std::collections::BTreeMap;
use std::path::Path;

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyIOError::new_err(m),
        e => PyValueError::new_err(format!("{}: {e}", e.kind())),
    }
}

fn entry(name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<CatalogEntry> {
    let pairs: Vec<(String, String)> = params.unwrap_or_default().into_iter().collect();
    catalog::build(name, &Params::new(&pairs)).map_err(err)
}

fn config() -> PyResult<Config> {
    Config::load().map_err(err)
}

fn points(f: &LocusFinding) -> Vec<(f64, f64)> {
    f.all_points().iter().map(|z| (z.re, z.im)).collect()
}

/// Names of the catalog entries.
#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog::list().iter().map(|i| i.name).collect()
}

/// Full analysis as a dict of the flat key-value report.
#[pyfunction]
#[pyo3(signature = (name, params=None, area=true))]
fn analyze(name: &str, params: Option<BTreeMap<String, String>>, area: bool) -> PyResult<BTreeMap<String, String>> {
    let e = entry(name, params)?;
    let a = analysis::analyze(&e, &config()?, Options { area, locus: true });
    Ok(analysis::to_kv(&a)
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect())
}

/// `(K, K_perp)` by the contour method, or by area exhaustion.
#[pyfunction]
#[pyo3(signature = (name, params=None, method="contour"))]
fn total_curvature(name: &str, params: Option<BTreeMap<String, String>>, method: &str) -> PyResult<(f64, f64)> {
    let e = entry(name, params)?;
    let cfg = config()?;
    let t = match method {
        "contour" => total_curvature_contour(&e.data, &cfg),
        "area" => total_curvature_area(&e.data, &cfg),
        m => return Err(PyValueError::new_err(format!("unknown method {m}"))),
    }
    .map_err(err)?;
    Ok((t.k_total, t.kperp_total))
}

/// `[(puncture, kind, index)]`.
#[pyfunction]
#[pyo3(signature = (name, params=None))]
fn ends(name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<Vec<(String, String, Option<i32>)>> {
    let e = entry(name, params)?;
    let r = end_records(&e.data, &config()?).map_err(err)?;
    Ok(r.into_iter().map(|r| (r.puncture.to_string(), r.kind.to_string(), r.index)).collect())
}

#[pyfunction]
#[pyo3(signature = (name, params=None))]
fn periods_vanish(name: &str, params: Option<BTreeMap<String, String>>) -> PyResult<bool> {
    let e = entry(name, params)?;
    Ok(period_report(&e.data, &config()?).map_err(err)?.pass())
}

/// Solutions of phi = conj(psi): `(kind, [(re, im)])`.
#[pyfunction]
#[pyo3(signature = (name, window, params=None, grid=None))]
fn locus(name: &str, window: &str, params: Option<BTreeMap<String, String>>, grid: Option<usize>) -> PyResult<(String, Vec<(f64, f64)>)> {
    let e = entry(name, params)?;
    let w: Window = window.parse().map_err(err)?;
    let f = scan(&e.data, w, grid.unwrap_or(config()?.locus_grid)).map_err(err)?;
    Ok((format!("{:?}", f.kind), points(&f)))
}

#[pyfunction]
fn scan_4pi(m: u32, a: (f64, f64)) -> PyResult<(String, Vec<(f64, f64)>)> {
    let f = fourpi_scan(m, C64::new(a.0, a.1), &config()?).map_err(err)?;
    Ok((format!("{:?}", f.kind), points(&f)))
}

/// Writes a mesh; returns `(vertices, faces, clusters)` where `clusters` is
/// the number of self-intersections found when `scan` is set.
#[pyfunction]
#[pyo3(signature = (name, out, res=64, proj="drop-x4", params=None, scan=false))]
fn mesh(name: &str, out: &str, res: usize, proj: &str, params: Option<BTreeMap<String, String>>, scan: bool) -> PyResult<(usize, usize, Option<usize>)> {
    let e = entry(name, params)?;
    let cfg = config()?;
    let p: Projection = proj.parse().map_err(err)?;
    let m = sample_mesh(&e.data, e.chart, res, &cfg).map_err(err)?;
    export_mesh(&m, p, Path::new(out)).map_err(err)?;
    let n = scan.then(|| self_intersection_scan(&e.data, &m, true, &cfg).clusters.len());
    Ok((m.vertices.len(), m.faces.len(), n))
}

/// `[(id, name, pass, detail)]` for the verification suite.
#[pyfunction]
#[pyo3(signature = (only=None))]
fn verify(only: Option<u32>) -> PyResult<Vec<(u32, String, bool, String)>> {
    let cfg = config()?;
    let outs = match only {
        Some(i) => vec![suite::run_one(i, &cfg)],
        None => suite::run_all(&cfg),
    };
    Ok(outs.into_iter().map(|o| (o.id, o.name.to_string(), o.pass, o.detail)).collect())
}

#[pymodule]
fn sslab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(total_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(ends, m)?)?;
    m.add_function(wrap_pyfunction!(periods_vanish, m)?)?;
    m.add_function(wrap_pyfunction!(locus, m)?)?;
    m.add_function(wrap_pyfunction!(scan_4pi, m)?)?;
    m.add_function(wrap_pyfunction!(mesh, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
