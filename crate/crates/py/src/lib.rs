//! Python bindings. Results that have a JSON form are returned as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use stabforge::cli::{parse_chamber, parse_slope};
use stabforge::degeneration::{
    elliptic_stab_rank1, legendre_dual_tessellation, nodal_floors, nodal_limit as limit_of, theta_check as run_theta_check,
    InertiaData, PeriodicConvexFunction,
};
use stabforge::envelope::{compute_stab, verify_stab, StabMatrix};
use stabforge::exact_algebra::parse_q;
use stabforge::gkm_model::{resonant_locus, GKMModel};

fn err(e: stabforge::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(builtin: &str, n: Option<usize>) -> PyResult<GKMModel> {
    GKMModel::builtin(builtin, n).map_err(err)
}

fn opt_slope(s: Option<&str>) -> PyResult<Option<stabforge::exact_algebra::Q>> {
    s.map(parse_slope).transpose().map_err(err)
}

/// Stable envelope of a builtin model, as JSON.
#[pyfunction]
#[pyo3(signature = (builtin, n=None, slope=None, chamber=None))]
fn stab(builtin: &str, n: Option<usize>, slope: Option<&str>, chamber: Option<&str>) -> PyResult<String> {
    let m = load(builtin, n)?;
    let c = parse_chamber(chamber, m.a_rank()).map_err(err)?;
    let s = compute_stab(&m, &c, opt_slope(slope)?, None).map_err(err)?;
    Ok(s.to_json().to_string())
}

/// Runs the independent checks on a matrix produced by `stab`.
#[pyfunction]
fn verify(stab_json: &str) -> PyResult<bool> {
    let v: serde_json::Value = serde_json::from_str(stab_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let s = StabMatrix::from_json(&v).map_err(err)?;
    Ok(verify_stab(&s, &s.model, &s.chamber, s.slope).pass())
}

#[pyfunction]
#[pyo3(signature = (builtin, n=None, chamber=None))]
fn resonance(builtin: &str, n: Option<usize>, chamber: Option<&str>) -> PyResult<Vec<String>> {
    let m = load(builtin, n)?;
    let c = parse_chamber(chamber, m.a_rank()).map_err(err)?;
    Ok(resonant_locus(&m, &c).map_err(err)?.iter().map(|z| m.ring.fmt_monomial(z)).collect())
}

#[pyfunction]
fn gram_matrix(weights: &str) -> PyResult<Vec<Vec<i64>>> {
    PeriodicConvexFunction::parse(weights).and_then(|f| f.gram_matrix()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (weights, shift=None))]
fn tessellate(weights: &str, shift: Option<Vec<String>>) -> PyResult<String> {
    let mut f = PeriodicConvexFunction::parse(weights).map_err(err)?;
    if let Some(s) = shift {
        let s = s.iter().map(|x| parse_q(x)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        f = f.with_shift(s).map_err(err)?;
    }
    Ok(legendre_dual_tessellation(&f).map_err(err)?.to_json().to_string())
}

/// Floor plan for `mu2`, `free`, or inertia data given as JSON.
#[pyfunction]
fn floors(source: &str) -> PyResult<String> {
    let data = match source {
        "mu2" => InertiaData::example_mu2(),
        "free" => InertiaData::example_free(),
        json => InertiaData::from_json_str(json).map_err(err)?,
    };
    Ok(nodal_floors(&data).map_err(err)?.to_json().to_string())
}

#[pyfunction]
fn theta_check(n: i64) -> PyResult<bool> {
    Ok(run_theta_check(n).map_err(err)?.pass())
}

/// `q -> 0` limit of the elliptic envelope of T*P^1, as JSON.
#[pyfunction]
#[pyo3(signature = (slope, zeta=None, n=16))]
fn nodal_limit(slope: &str, zeta: Option<&str>, n: i64) -> PyResult<String> {
    let m = GKMModel::tstar_pn(2).map_err(err)?;
    let e = elliptic_stab_rank1(&m, opt_slope(Some(slope))?, zeta, n).map_err(err)?;
    Ok(limit_of(&e).map_err(err)?.to_json().to_string())
}

#[pymodule]
pub fn stabforge_py(_py: Python<'_>, m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(stab, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(resonance, m)?)?;
    m.add_function(wrap_pyfunction!(gram_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(tessellate, m)?)?;
    m.add_function(wrap_pyfunction!(floors, m)?)?;
    m.add_function(wrap_pyfunction!(theta_check, m)?)?;
    m.add_function(wrap_pyfunction!(nodal_limit, m)?)?;
    Ok(())
}
