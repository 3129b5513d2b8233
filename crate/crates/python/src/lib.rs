//! Python bindings for the cointest toolkit.
//!
//! Exposes series simulation, model fitting, the three specification-test
//! statistics, and the subsampling machinery as plain functions returning
//! Python dicts/lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use cointest::error::Error;
use cointest::kernel::{self, BandwidthRule};
use cointest::models::{self, ModelFamily};
use cointest::montecarlo::{gen_response, GenModel};
use cointest::processes::{self, CoeffKind, ErrorSpec, MemoryKind, ProcessConfig};
use cointest::stat_tests::{self, WeightWindow, DEFAULT_GRID_POINTS};
use cointest::subsampling::{self, BlockResiduals, ScanStatistic};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Usage(_) | Error::Config(_) | Error::Domain(_) | Error::Length(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse_family(name: &str) -> PyResult<ModelFamily> {
    match name {
        "linear" => Ok(ModelFamily::Linear),
        "quadratic" => Ok(ModelFamily::Quadratic),
        "exp" | "exp-integrable" => Ok(ModelFamily::ExpIntegrable),
        _ => Err(PyValueError::new_err(format!(
            "unknown hypothesis '{name}' (expected linear | quadratic | exp)"
        ))),
    }
}

fn parse_memory(name: &str) -> PyResult<MemoryKind> {
    match name {
        "lm" => Ok(MemoryKind::Lm),
        "slm" => Ok(MemoryKind::Slm),
        _ => Err(PyValueError::new_err(format!(
            "unknown memory kind '{name}' (expected lm | slm)"
        ))),
    }
}

fn parse_gen_model(name: &str, nu: f64) -> PyResult<GenModel> {
    Ok(match name {
        "null-linear" | "b1" => GenModel::NullLinear,
        "local-alt" => GenModel::LocalAlt { nu },
        "b2" => GenModel::B2,
        "b3" => GenModel::B3,
        "b4" => GenModel::B4,
        "b5" => GenModel::B5,
        "null-exp" | "b6" => GenModel::NullExp,
        "b7" => GenModel::B7,
        "b8" => GenModel::B8,
        "b9" => GenModel::B9,
        "b10" => GenModel::B10,
        _ => {
            return Err(PyValueError::new_err(format!(
                "unknown generating model '{name}'"
            )))
        }
    })
}

/// Simulate a series from the LM/SLM design and return {x, y, u}.
#[pyfunction]
#[pyo3(signature = (n, d, *, memory="lm", lambda_=0.0, r=0.5, sigma=0.2,
                    ar_psi=None, ma_mu_theta=None, trunc=1000, seed=0,
                    model="null-linear", theta=None, nu=3.0))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    n: usize,
    d: f64,
    memory: &str,
    lambda_: f64,
    r: f64,
    sigma: f64,
    ar_psi: Option<f64>,
    ma_mu_theta: Option<(f64, f64)>,
    trunc: usize,
    seed: u64,
    model: &str,
    theta: Option<Vec<f64>>,
    nu: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let error_spec = match (ar_psi, ma_mu_theta) {
        (Some(_), Some(_)) => {
            return Err(PyValueError::new_err("give either ar_psi or ma_mu_theta, not both"))
        }
        (None, Some((mu, theta))) => ErrorSpec::Ma1 { mu, theta },
        (psi, None) => ErrorSpec::Ar1 { psi: psi.unwrap_or(0.25) },
    };
    let cfg = ProcessConfig {
        kind: parse_memory(memory)?,
        d,
        lambda: lambda_,
        r,
        error_spec,
        sigma,
        n,
        trunc,
        coeffs: CoeffKind::default(),
        seed,
    };
    cfg.validate().map_err(py_err)?;
    let gen = parse_gen_model(model, nu)?;
    let theta = theta.unwrap_or_else(|| match gen.theta_arity() {
        2 => vec![0.0, 1.0],
        _ => vec![1.0],
    });
    let h = BandwidthRule::Power.bandwidth(n).map_err(py_err)?;
    let mut series = processes::build_series(&cfg, |x| x).map_err(py_err)?;
    let u = series.u.clone().expect("simulated series keeps errors");
    series.y = gen_response(gen, &series.x, &u, sigma, &theta, h).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("x", series.x)?;
    out.set_item("y", series.y)?;
    out.set_item("u", u)?;
    Ok(out)
}

/// Least-squares fit; returns the coefficient list.
#[pyfunction]
fn fit_model(hypothesis: &str, x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
    let family = parse_family(hypothesis)?;
    let spec = models::fit(family, &x, &y, None).map_err(py_err)?;
    Ok(spec.params)
}

/// Standard normal density.
#[pyfunction]
fn gaussian_kernel(x: f64) -> f64 {
    kernel::gaussian_kernel(x)
}

/// Nadaraya-Watson estimate at a point.
#[pyfunction]
fn nw_estimate(x: Vec<f64>, y: Vec<f64>, x0: f64, h: f64) -> PyResult<f64> {
    kernel::nw_estimate(&x, &y, x0, h).map_err(py_err)
}

/// Leave-one-out cross-validated bandwidth over a grid;
/// returns (h_opt, score, excluded).
#[pyfunction]
#[pyo3(signature = (x, y, grid=None))]
fn select_bandwidth(
    x: Vec<f64>,
    y: Vec<f64>,
    grid: Option<Vec<f64>>,
) -> PyResult<(f64, f64, usize)> {
    let grid = grid.unwrap_or_else(|| kernel::default_bandwidth_grid(&x));
    let (h, sc) = kernel::select_bandwidth(&x, &y, &grid).map_err(py_err)?;
    Ok((h, sc.score, sc.excluded))
}

/// Upper tail of the chi-squared distribution.
#[pyfunction]
fn chi2_sf(x: f64, dof: usize) -> PyResult<f64> {
    stat_tests::chi2_sf(x, dof).map_err(py_err)
}

fn outcome_dict<'py>(
    py: Python<'py>,
    column: (&str, usize),
    statistic: f64,
    normalized: Option<f64>,
    pvalue: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item(column.0, column.1)?;
    d.set_item("statistic", statistic)?;
    if let Some(z) = normalized {
        d.set_item("normalized", z)?;
    }
    d.set_item("pvalue", pvalue)?;
    Ok(d)
}

/// SNU test with subsampling; one dict per block length.
#[pyfunction]
#[pyo3(signature = (x, y, hypothesis, blocks, *, residuals="parametric", h=None))]
fn snu_test<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    y: Vec<f64>,
    hypothesis: &str,
    blocks: Vec<usize>,
    residuals: &str,
    h: Option<f64>,
) -> PyResult<Bound<'py, PyList>> {
    let family = parse_family(hypothesis)?;
    let n = x.len();
    let h = match h {
        Some(h) => h,
        None => BandwidthRule::Power.bandwidth(n).map_err(py_err)?,
    };
    let fitted = models::fit(family, &x, &y, None).map_err(py_err)?;
    let uhat = models::residuals(&fitted, &x, &y);
    let stat = stat_tests::snu_statistic(&uhat, &x, h).map_err(py_err)?;
    let z = stat.z_value().map_err(py_err)?;
    let np_resid;
    let resid = match residuals {
        "parametric" => BlockResiduals::Refit { family, y: &y },
        "nonparametric" => {
            np_resid = models::nonparametric_residuals(&x, &y, h).map_err(py_err)?;
            BlockResiduals::Sliced(&np_resid)
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown residual source '{other}'"
            )))
        }
    };
    let out = PyList::empty(py);
    for &b in &blocks {
        let m = subsampling::max_subsamples(n, b);
        let dist = subsampling::subsample_snu_with(&x, &resid, b, m, BandwidthRule::Fixed { h })
            .map_err(py_err)?;
        let p = subsampling::pvalue_snu(z, &dist);
        out.append(outcome_dict(py, ("block", b), stat.s, Some(z), p)?)?;
    }
    Ok(out)
}

/// Portmanteau test; one dict per lag count.
#[pyfunction]
#[pyo3(signature = (x, y, hypothesis, *, p=1, lags=vec![6, 12, 18]))]
fn portmanteau_test<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    y: Vec<f64>,
    hypothesis: &str,
    p: usize,
    lags: Vec<usize>,
) -> PyResult<Bound<'py, PyList>> {
    let family = parse_family(hypothesis)?;
    let fitted = models::fit(family, &x, &y, None).map_err(py_err)?;
    let uhat = models::residuals(&fitted, &x, &y);
    let out = PyList::empty(py);
    for &lag in &lags {
        let o = stat_tests::portmanteau(&uhat, p, lag).map_err(py_err)?;
        out.append(outcome_dict(
            py,
            ("lag", lag),
            o.statistic,
            None,
            o.pvalue.expect("portmanteau sets a p-value"),
        )?)?;
    }
    Ok(out)
}

/// De-biased MHM test with subsampling; one dict per block length.
#[pyfunction]
#[pyo3(signature = (x, y, hypothesis, blocks, *, memory="lm", d=0.1, lambda_=0.0,
                    window=100.0, grid_points=DEFAULT_GRID_POINTS))]
#[allow(clippy::too_many_arguments)]
fn mhm_debiased_test<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    y: Vec<f64>,
    hypothesis: &str,
    blocks: Vec<usize>,
    memory: &str,
    d: f64,
    lambda_: f64,
    window: f64,
    grid_points: usize,
) -> PyResult<Bound<'py, PyList>> {
    let family = parse_family(hypothesis)?;
    let kind = parse_memory(memory)?;
    let win = WeightWindow::symmetric(window).map_err(py_err)?;
    let fitted = models::fit(family, &x, &y, None).map_err(py_err)?;
    let uhat = models::residuals(&fitted, &x, &y);
    let resid = BlockResiduals::Refit { family, y: &y };
    let report = subsampling::debias_mhm(
        &x,
        &uhat,
        &resid,
        kind,
        d,
        lambda_,
        BandwidthRule::Power,
        win,
        grid_points,
    )
    .map_err(py_err)?;
    let out = PyList::empty(py);
    for &b in &blocks {
        let p = subsampling::debiased_mhm_pvalue(
            &x,
            &resid,
            b,
            None,
            BandwidthRule::Power,
            kind,
            d,
            lambda_,
            win,
            grid_points,
            &report,
        )
        .map_err(py_err)?;
        let dict = outcome_dict(py, ("block", b), report.full_normalized, Some(report.debiased), p)?;
        dict.set_item("bias_estimate", report.bias_n)?;
        out.append(dict)?;
    }
    Ok(out)
}

/// SNU p-value versus block length; returns a list of (b, pvalue-or-None).
#[pyfunction]
#[pyo3(signature = (x, y, hypothesis, b_lo, b_hi, *, step=1, residuals="parametric"))]
#[allow(clippy::too_many_arguments)]
fn scan_blocks(
    x: Vec<f64>,
    y: Vec<f64>,
    hypothesis: &str,
    b_lo: usize,
    b_hi: usize,
    step: usize,
    residuals: &str,
) -> PyResult<Vec<(usize, Option<f64>)>> {
    let family = parse_family(hypothesis)?;
    let n = x.len();
    let h = BandwidthRule::Power.bandwidth(n).map_err(py_err)?;
    let fitted = models::fit(family, &x, &y, None).map_err(py_err)?;
    let uhat = models::residuals(&fitted, &x, &y);
    let z = stat_tests::snu_statistic(&uhat, &x, h)
        .map_err(py_err)?
        .z_value()
        .map_err(py_err)?;
    let np_resid;
    let resid = match residuals {
        "parametric" => BlockResiduals::Refit { family, y: &y },
        "nonparametric" => {
            np_resid = models::nonparametric_residuals(&x, &y, h).map_err(py_err)?;
            BlockResiduals::Sliced(&np_resid)
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown residual source '{other}'"
            )))
        }
    };
    subsampling::block_scan(
        &x,
        &resid,
        &ScanStatistic::Snu { full_z: z },
        b_lo,
        b_hi,
        step,
        BandwidthRule::Fixed { h },
    )
    .map_err(py_err)
}

/// Minimal-volatility block selection from a (b, pvalue) curve.
#[pyfunction]
#[pyo3(signature = (curve, window=5))]
fn minimal_volatility(curve: Vec<(usize, f64)>, window: usize) -> PyResult<usize> {
    subsampling::minimal_volatility(&curve, window).map_err(py_err)
}

#[pymodule]
fn _cointest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_model, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(nw_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(select_bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(chi2_sf, m)?)?;
    m.add_function(wrap_pyfunction!(snu_test, m)?)?;
    m.add_function(wrap_pyfunction!(portmanteau_test, m)?)?;
    m.add_function(wrap_pyfunction!(mhm_debiased_test, m)?)?;
    m.add_function(wrap_pyfunction!(scan_blocks, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_volatility, m)?)?;
    Ok(())
}
