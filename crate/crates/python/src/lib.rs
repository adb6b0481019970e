//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (plain ints are accepted on input).

use std::collections::BTreeMap;

use clap::Parser;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use superqkz_core::config::{resolve, Cli};
use superqkz_core::correspondence::{check_kz_calogero, check_qkz_macdonald};
use superqkz_core::omega::build_omega;
use superqkz_core::rmatrix::build_r;
use superqkz_core::runner::run_suites;
use superqkz_core::scalar::Value;
use superqkz_core::{ChainConfig, CheckReport, Grading, OmegaKind, RFamily, RParams, Rational, Space};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn grading(k: usize, bosons: &[usize]) -> PyResult<Grading> {
    Grading::new(k, bosons).map_err(err)
}

fn family(name: &str) -> PyResult<RFamily> {
    name.parse().map_err(err)
}

#[allow(clippy::too_many_arguments)]
fn chain(
    name: &str,
    k: usize,
    bosons: &[usize],
    x: Vec<Rational>,
    g: Vec<Rational>,
    coupling: Rational,
    shift: Rational,
    kappa: Rational,
) -> PyResult<ChainConfig<Rational>> {
    ChainConfig::new(grading(k, bosons)?, family(name)?, x, g, RParams::new(coupling, shift), kappa).map_err(err)
}

/// (passed, eigenvalue or None)
fn outcome(report: CheckReport) -> (bool, Option<Rational>) {
    let passed = report.passed();
    let e = match report.eigenvalue {
        Some(Value::Exact(e)) => Some(e),
        _ => None,
    };
    (passed, e)
}

/// Ω coefficients keyed by word, e.g. {"112": 1, "121": -1, ...}.
///
/// kind is sym-plus, sym-minus, q-plus or q-minus; the q kinds need q.
#[pyfunction]
#[pyo3(signature = (kind, k, bosons, weights, q=None))]
fn omega(
    kind: &str,
    k: usize,
    bosons: Vec<usize>,
    weights: Vec<usize>,
    q: Option<Rational>,
) -> PyResult<BTreeMap<String, Rational>> {
    let need_q = || q.clone().ok_or_else(|| PyValueError::new_err(format!("{kind} needs q")));
    let kind = match kind {
        "sym-plus" => OmegaKind::SymPlus,
        "sym-minus" => OmegaKind::SymMinus,
        "q-plus" => OmegaKind::QPlus(need_q()?),
        "q-minus" => OmegaKind::QMinus(need_q()?),
        other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
    };
    let n = weights.iter().sum();
    let v = build_omega(&kind, &grading(k, &bosons)?, &weights, n).map_err(err)?;
    Ok(v.coeffs().map(|(j, c)| (j.letters().iter().map(|a| a.to_string()).collect(), c.clone())).collect())
}

/// Dense K²×K² matrix of R(x) in the basis e_a⊗e_b, row index a·K + b.
#[pyfunction]
fn r_matrix(
    family_name: &str,
    x: Rational,
    coupling: Rational,
    k: usize,
    bosons: Vec<usize>,
) -> PyResult<Vec<Vec<Rational>>> {
    let g = grading(k, &bosons)?;
    let op = build_r(family(family_name)?, &x, &coupling, &g)
        .and_then(|r| r.embed(&[0, 1], Space::new(k, 2), &g))
        .map_err(err)?;
    let mut out = vec![vec![Rational::default(); k * k]; k * k];
    for (i, j, v) in op.entries() {
        out[i][j] = v.clone();
    }
    Ok(out)
}

/// Order-d Macdonald identity on the matching Ω; returns (passed, E_d).
#[pyfunction]
#[pyo3(signature = (family_name, k, bosons, x, g, coupling, shift, weights, d=1))]
#[allow(clippy::too_many_arguments)]
fn macdonald(
    family_name: &str,
    k: usize,
    bosons: Vec<usize>,
    x: Vec<Rational>,
    g: Vec<Rational>,
    coupling: Rational,
    shift: Rational,
    weights: Vec<usize>,
    d: usize,
) -> PyResult<(bool, Option<Rational>)> {
    let cfg = chain(family_name, k, &bosons, x, g, coupling, shift, Rational::from_integer(1.into()))?;
    Ok(outcome(check_qkz_macdonald(&cfg, d, &weights)))
}

/// KZ to Calogero identity for a rational-plus chain; returns (passed, E).
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn calogero(
    k: usize,
    bosons: Vec<usize>,
    x: Vec<Rational>,
    g: Vec<Rational>,
    eta: Rational,
    hbar: Rational,
    kappa: Rational,
    weights: Vec<usize>,
) -> PyResult<(bool, Option<Rational>)> {
    let cfg = chain("rational-plus", k, &bosons, x, g, eta, hbar, kappa)?;
    Ok(outcome(check_kz_calogero(&cfg, &weights)))
}

/// Runs the command-line checker in-process; returns (exit code, JSON report).
///
/// The environment seed is ignored so results depend on the arguments only.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(i32, String)> {
    let cli = Cli::try_parse_from(std::iter::once("superqkz".to_string()).chain(args)).map_err(err)?;
    let cfg = resolve(&cli, &BTreeMap::new(), None).map_err(err)?;
    let doc = run_suites(&cfg).map_err(err)?;
    Ok((doc.exit_code(), doc.to_json()))
}

#[pymodule]
fn superqkz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(r_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(macdonald, m)?)?;
    m.add_function(wrap_pyfunction!(calogero, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
