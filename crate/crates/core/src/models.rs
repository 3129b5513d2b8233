//! Hypothesized regression families `g(x, θ)`, least-squares fitting, and
//! residual construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::nw_at;

/// Regression families covered by the test procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    /// `g(x) = θ0 + θ1 x`
    Linear,
    /// `g(x) = θ0 + θ1 x + θ2 x²`
    Quadratic,
    /// `g(x) = exp(−θ1 |x|)`, θ1 > 0 (integrable, no intercept)
    ExpIntegrable,
}

impl ModelFamily {
    pub fn arity(&self) -> usize {
        match self {
            ModelFamily::Linear => 2,
            ModelFamily::Quadratic => 3,
            ModelFamily::ExpIntegrable => 1,
        }
    }
}

/// A fitted (or hypothesized) model: family plus coefficient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    pub params: Vec<f64>,
}

impl ModelSpec {
    pub fn new(family: ModelFamily, params: Vec<f64>) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::Usage(format!(
                "{family:?} takes {} parameters, got {}",
                family.arity(),
                params.len()
            )));
        }
        Ok(ModelSpec { family, params })
    }

    /// Evaluate `g(x, θ)`.
    pub fn predict(&self, x: f64) -> f64 {
        let p = &self.params;
        match self.family {
            ModelFamily::Linear => p[0] + p[1] * x,
            ModelFamily::Quadratic => p[0] + x * (p[1] + x * p[2]),
            ModelFamily::ExpIntegrable => (-p[0] * x.abs()).exp(),
        }
    }

    /// Residual sum of squares on a data set.
    pub fn rss(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .map(|(&xk, &yk)| {
                let e = yk - self.predict(xk);
                e * e
            })
            .sum()
    }
}

/// Least-squares fit of `family` to the data.
///
/// Linear and quadratic families are solved through their normal equations
/// (with column equilibration); the integrable exponential is fitted by a
/// bracketed golden-section search on `log θ1` followed by damped Newton
/// refinement. When `init` is given, the returned fit never has larger
/// residual sum of squares than `init`.
pub fn fit(
    family: ModelFamily,
    x_data: &[f64],
    y_data: &[f64],
    init: Option<&[f64]>,
) -> Result<ModelSpec> {
    if x_data.len() != y_data.len() {
        return Err(Error::Length(format!(
            "x and y lengths differ: {} vs {}",
            x_data.len(),
            y_data.len()
        )));
    }
    if x_data.len() < family.arity() {
        return Err(Error::Usage(format!(
            "need at least {} observations to fit {family:?}, got {}",
            family.arity(),
            x_data.len()
        )));
    }
    match family {
        ModelFamily::Linear => {
            let cols: Vec<Vec<f64>> = vec![vec![1.0; x_data.len()], x_data.to_vec()];
            let theta = normal_equations(&cols, y_data)?;
            ModelSpec::new(family, theta)
        }
        ModelFamily::Quadratic => {
            let sq: Vec<f64> = x_data.iter().map(|v| v * v).collect();
            let cols: Vec<Vec<f64>> = vec![vec![1.0; x_data.len()], x_data.to_vec(), sq];
            let theta = normal_equations(&cols, y_data)?;
            ModelSpec::new(family, theta)
        }
        ModelFamily::ExpIntegrable => fit_exp_integrable(x_data, y_data, init),
    }
}

/// Solve the least-squares normal equations for the given design columns.
/// Columns are scaled to unit norm before elimination; a vanishing pivot
/// signals a singular design.
fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let m = cols.len();
    let mut scale = vec![0.0; m];
    for (j, col) in cols.iter().enumerate() {
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Rank("design column is identically zero".into()));
        }
        scale[j] = norm;
    }
    // scaled Gram matrix and right-hand side
    let mut g = vec![vec![0.0; m]; m];
    let mut c = vec![0.0; m];
    for i in 0..m {
        for j in i..m {
            let dot: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            let v = dot / (scale[i] * scale[j]);
            g[i][j] = v;
            g[j][i] = v;
        }
        c[i] = cols[i].iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / scale[i];
    }
    let z = crate::special::solve_small(&mut g, &mut c).map_err(|_| {
        Error::Rank("singular normal equations (collinear design)".into())
    })?;
    Ok(z.iter().zip(&scale).map(|(zi, si)| zi / si).collect())
}

const EXP_LOG_LO: f64 = -6.907755278982137; // ln 1e-3
const EXP_LOG_HI: f64 = 6.907755278982137; // ln 1e3
const EXP_GRID: usize = 121;

fn fit_exp_integrable(x: &[f64], y: &[f64], init: Option<&[f64]>) -> Result<ModelSpec> {
    let rss = |theta: f64| -> f64 {
        x.iter()
            .zip(y)
            .map(|(&xk, &yk)| {
                let e = yk - (-theta * xk.abs()).exp();
                e * e
            })
            .sum()
    };
    if let Some(p) = init {
        if p.len() != 1 || !(p[0] > 0.0) {
            return Err(Error::Usage(
                "ExpIntegrable init must be a single positive value".into(),
            ));
        }
    }

    // coarse scan on the log scale to bracket the minimum
    let ts: Vec<f64> = (0..EXP_GRID)
        .map(|i| EXP_LOG_LO + (EXP_LOG_HI - EXP_LOG_LO) * i as f64 / (EXP_GRID - 1) as f64)
        .collect();
    let qs: Vec<f64> = ts.iter().map(|t| rss(t.exp())).collect();
    let mut best = 0;
    for i in 1..EXP_GRID {
        if qs[i] < qs[best] {
            best = i;
        }
    }
    if best == 0 || best == EXP_GRID - 1 {
        return Err(Error::Optimization(format!(
            "no interior bracket for theta1 in [1e-3, 1e3]: best rss {:.6e} at theta1={:.6e} \
             (boundary), rss at other end {:.6e}",
            qs[best],
            ts[best].exp(),
            qs[EXP_GRID - 1 - best]
        )));
    }

    // golden-section on log theta over the bracketing pair of grid cells
    let (mut lo, mut hi) = (ts[best - 1], ts[best + 1]);
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut t1 = hi - gr * (hi - lo);
    let mut t2 = lo + gr * (hi - lo);
    let mut q1 = rss(t1.exp());
    let mut q2 = rss(t2.exp());
    while hi - lo > 1e-12 {
        if q1 < q2 {
            hi = t2;
            t2 = t1;
            q2 = q1;
            t1 = hi - gr * (hi - lo);
            q1 = rss(t1.exp());
        } else {
            lo = t1;
            t1 = t2;
            q1 = q2;
            t2 = lo + gr * (hi - lo);
            q2 = rss(t2.exp());
        }
    }
    let mut theta = (0.5 * (lo + hi)).exp();
    let mut q_theta = rss(theta);

    // a few damped Newton steps in the original scale
    for _ in 0..8 {
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (&xk, &yk) in x.iter().zip(y) {
            let ax = xk.abs();
            let g = (-theta * ax).exp();
            let r = yk - g;
            d1 += 2.0 * r * ax * g;
            d2 += 2.0 * (ax * g * ax * g - r * ax * ax * g);
        }
        if d2 <= 0.0 || !d1.is_finite() {
            break;
        }
        let mut step = d1 / d2;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = theta - step;
            if cand > 0.0 {
                let q_cand = rss(cand);
                if q_cand <= q_theta {
                    theta = cand;
                    q_theta = q_cand;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || step.abs() < 1e-14 * theta.max(1.0) {
            break;
        }
    }

    if let Some(p) = init {
        if rss(p[0]) < q_theta {
            theta = p[0];
        }
    }
    ModelSpec::new(ModelFamily::ExpIntegrable, vec![theta])
}

/// Parametric residuals `û_k = y_k − g(x_k, θ̂)`.
pub fn residuals(model: &ModelSpec, x_data: &[f64], y_data: &[f64]) -> Vec<f64> {
    assert_eq!(x_data.len(), y_data.len(), "x and y lengths differ");
    x_data
        .iter()
        .zip(y_data)
        .map(|(&xk, &yk)| yk - model.predict(xk))
        .collect()
}

/// Nonparametric residuals `ũ_k = y_k − f̂(x_k)` from the full-data
/// Nadaraya-Watson estimator (observation k included, so the self-weight
/// keeps every point well defined).
pub fn nonparametric_residuals(x_data: &[f64], y_data: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
    }
    if x_data.len() != y_data.len() {
        return Err(Error::Length(format!(
            "x and y lengths differ: {} vs {}",
            x_data.len(),
            y_data.len()
        )));
    }
    let mut out = Vec::with_capacity(x_data.len());
    for (k, (&xk, &yk)) in x_data.iter().zip(y_data).enumerate() {
        match nw_at(x_data, y_data, xk, h) {
            Some(fhat) => out.push(yk - fhat),
            None => {
                return Err(Error::Degenerate(format!(
                    "zero kernel weight at observation {k}"
                )))
            }
        }
    }
    Ok(out)
}
