//! Long-memory and semi-long-memory input shocks, endogenous error processes,
//! partial-sum regressor paths, and their normalization scalings.
//!
//! Shocks are truncated moving averages of bivariate-normal innovations:
//! `X(j) = Σ_{k=0}^{trunc} c_k φ(d,k) ξ(j−k)` with `c_k = 1` (LM) or
//! `c_k = e^{−λk}` (SLM). The coefficients follow the fractional-binomial
//! recursion `φ(d,0)=1`, `φ(d,k)=φ(d,k−1)(k−1+d)/k`, which decays like
//! `k^{d−1}`. Regressors are the partial sums `x_k = Σ_{j<=k} X(j)`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::adaptive_simpson;

/// Memory structure of the regressor input shocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryKind {
    /// Long memory: hyperbolically decaying MA coefficients, `0 < d < 1/2`.
    Lm,
    /// Semi-long memory: LM coefficients tempered by `e^{−λk}`, any `d > 0`.
    Slm,
}

/// Equation-error process for `u_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ErrorSpec {
    /// `u_k = ψ u_{k−1} + ε(k)`, initialized by a burn-in over the presample.
    Ar1 { psi: f64 },
    /// `u_k = μ + ε(k) + θ ε(k−1)`.
    Ma1 { mu: f64, theta: f64 },
}

/// Moving-average coefficient convention for the shocks.
///
/// Both decay like `k^{d−1}`; they differ in the slowly varying factor.
/// The power law has `ρ(k) ≡ 1` and is the convention the LM scaling
/// constant `c_d` is built on, so it is the default; the fractional binomial
/// carries `ρ(k) → 1/Γ(d)` and matches ARFIMA/ARTFIMA filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoeffKind {
    /// `φ(d,0) = 1`, `φ(d,k) = k^{d−1}` for `k ≥ 1`.
    #[default]
    PowerLaw,
    /// `φ(d,k) = Γ(k+d)/(Γ(d)Γ(k+1))`.
    Binomial,
}

/// Full description of one simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub kind: MemoryKind,
    /// Fractional differencing parameter.
    pub d: f64,
    /// Tempering parameter; read only under SLM.
    pub lambda: f64,
    /// Contemporaneous correlation between shock and error innovations.
    pub r: f64,
    pub error_spec: ErrorSpec,
    /// Error scale σ in `y_k = f(x_k) + σ u_k`.
    pub sigma: f64,
    /// Series length N.
    pub n: usize,
    /// Truncation lag of the infinite MA; also the presample length.
    pub trunc: usize,
    /// Shock coefficient convention.
    #[serde(default)]
    pub coeffs: CoeffKind,
    pub seed: u64,
}

impl ProcessConfig {
    /// Check the parameter invariants; every generator entry point calls this.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            MemoryKind::Lm => {
                if !(self.d > 0.0 && self.d < 0.5) {
                    return Err(Error::Domain(format!(
                        "LM requires 0 < d < 1/2, got d={}",
                        self.d
                    )));
                }
            }
            MemoryKind::Slm => {
                if self.d <= 0.0 {
                    return Err(Error::Domain(format!(
                        "SLM requires d > 0, got d={}",
                        self.d
                    )));
                }
                if self.lambda <= 0.0 {
                    return Err(Error::Domain(format!(
                        "SLM requires lambda > 0, got lambda={}",
                        self.lambda
                    )));
                }
            }
        }
        if !(self.r.abs() <= 1.0) {
            return Err(Error::Domain(format!("|r| <= 1 required, got r={}", self.r)));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Domain(format!(
                "sigma >= 0 required, got sigma={}",
                self.sigma
            )));
        }
        if let ErrorSpec::Ar1 { psi } = self.error_spec {
            if psi.abs() >= 1.0 {
                return Err(Error::Domain(format!(
                    "AR(1) requires |psi| < 1, got psi={psi}"
                )));
            }
        }
        if self.trunc < 1 {
            return Err(Error::Domain("trunc >= 1 required".into()));
        }
        if self.n < 1 {
            return Err(Error::Domain("n >= 1 required".into()));
        }
        Ok(())
    }
}

/// Paired innovation streams `(ξ, ε)` with `corr(ξ(k), ε(k)) = r`.
///
/// Both sequences have length `n + trunc`; the leading `trunc` entries are the
/// presample feeding indices `j − k < 1` of the shock moving average and the
/// error burn-in.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationPair {
    pub xi: Vec<f64>,
    pub eps: Vec<f64>,
    pub r: f64,
}

/// An aligned regressor/response path, plus the raw error channel when the
/// series was simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPair {
    /// Regressor partial sums `x_1..x_N`.
    pub x: Vec<f64>,
    /// Responses `y_1..y_N`.
    pub y: Vec<f64>,
    /// True errors `u_1..u_N` (before scaling by σ); simulation only.
    pub u: Option<Vec<f64>>,
}

impl SeriesPair {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Fractional-binomial coefficients `φ(d,k) = Γ(k+d)/(Γ(d)Γ(k+1))` for
/// `k = 0..n_terms−1`, computed by the stable recursion
/// `φ(d,0)=1`, `φ(d,k)=φ(d,k−1)·(k−1+d)/k`.
pub fn frac_coeffs(d: f64, n_terms: usize) -> Result<Vec<f64>> {
    if d <= 0.0 {
        return Err(Error::Domain(format!("frac_coeffs requires d > 0, got {d}")));
    }
    if n_terms < 1 {
        return Err(Error::Usage("frac_coeffs requires n_terms >= 1".into()));
    }
    let mut phi = Vec::with_capacity(n_terms);
    phi.push(1.0);
    for k in 1..n_terms {
        let k_f = k as f64;
        let prev = phi[k - 1];
        phi.push(prev * (k_f - 1.0 + d) / k_f);
    }
    Ok(phi)
}

/// Pure power-law coefficients `φ(d,0) = 1`, `φ(d,k) = k^{d−1}` (the
/// `ρ(k) ≡ 1` convention matching the `c_d` scaling constant).
pub fn power_coeffs(d: f64, n_terms: usize) -> Result<Vec<f64>> {
    if d <= 0.0 {
        return Err(Error::Domain(format!(
            "power_coeffs requires d > 0, got {d}"
        )));
    }
    if n_terms < 1 {
        return Err(Error::Usage("power_coeffs requires n_terms >= 1".into()));
    }
    let mut phi = Vec::with_capacity(n_terms);
    phi.push(1.0);
    for k in 1..n_terms {
        phi.push((k as f64).powf(d - 1.0));
    }
    Ok(phi)
}

/// Coefficients of the given convention.
pub fn shock_coeffs(kind: CoeffKind, d: f64, n_terms: usize) -> Result<Vec<f64>> {
    match kind {
        CoeffKind::PowerLaw => power_coeffs(d, n_terms),
        CoeffKind::Binomial => frac_coeffs(d, n_terms),
    }
}

/// Draw `n + trunc` pairs of correlated standard-normal innovations.
///
/// `ε(k) = r·ξ(k) + √(1−r²)·w(k)` with independent `ξ, w`; the construction is
/// deterministic given the seed.
pub fn gen_innovations(n: usize, trunc: usize, r: f64, seed: u64) -> Result<InnovationPair> {
    if !(r.abs() <= 1.0) {
        return Err(Error::Domain(format!("|r| <= 1 required, got r={r}")));
    }
    let total = n + trunc;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let root = (1.0 - r * r).max(0.0).sqrt();
    let mut xi = Vec::with_capacity(total);
    let mut eps = Vec::with_capacity(total);
    for _ in 0..total {
        let z: f64 = normal.sample(&mut rng);
        let w: f64 = normal.sample(&mut rng);
        xi.push(z);
        eps.push(r * z + root * w);
    }
    Ok(InnovationPair { xi, eps, r })
}

/// Generate the shock sequence `X(1..N)` from an innovation pair.
///
/// `X(j) = Σ_{k=0}^{trunc} c_k φ(d,k) ξ(j−k)` with `c_k = e^{−λk}` under SLM
/// and `c_k = 1` under LM. A zero tempering parameter reproduces the LM path
/// exactly.
pub fn gen_shocks(cfg: &ProcessConfig, innov: &InnovationPair) -> Result<Vec<f64>> {
    let need = cfg.n + cfg.trunc;
    if innov.xi.len() < need {
        return Err(Error::Length(format!(
            "need {need} innovations (n + trunc), got {}",
            innov.xi.len()
        )));
    }
    let phi = shock_coeffs(cfg.coeffs, cfg.d, cfg.trunc + 1)?;
    let weights: Vec<f64> = match cfg.kind {
        MemoryKind::Lm => phi,
        MemoryKind::Slm => phi
            .iter()
            .enumerate()
            .map(|(k, &p)| (-cfg.lambda * k as f64).exp() * p)
            .collect(),
    };
    // xi[p] holds the innovation at time p - trunc + 1, so time j maps to
    // index j + trunc - 1 and X(j) reads indices j-k+trunc-1 for k=0..trunc.
    let xi = &innov.xi;
    let trunc = cfg.trunc;
    let mut shocks = Vec::with_capacity(cfg.n);
    for j in 1..=cfg.n {
        let base = j + trunc - 1;
        let mut acc = 0.0;
        for (k, &w) in weights.iter().enumerate() {
            acc += w * xi[base - k];
        }
        shocks.push(acc);
    }
    Ok(shocks)
}

/// Generate the error sequence `u(1..N)`.
///
/// AR(1) runs the recursion through the `trunc` presample innovations before
/// emitting `u_1`; MA(1) reads one presample innovation for `ε(0)`.
pub fn gen_errors(cfg: &ProcessConfig, innov: &InnovationPair) -> Result<Vec<f64>> {
    let need = cfg.n + cfg.trunc;
    if innov.eps.len() < need {
        return Err(Error::Length(format!(
            "need {need} innovations (n + trunc), got {}",
            innov.eps.len()
        )));
    }
    let eps = &innov.eps;
    let trunc = cfg.trunc;
    match cfg.error_spec {
        ErrorSpec::Ar1 { psi } => {
            if psi.abs() >= 1.0 {
                return Err(Error::Domain(format!(
                    "AR(1) requires |psi| < 1, got psi={psi}"
                )));
            }
            let mut u = 0.0;
            for &e in eps.iter().take(trunc) {
                u = psi * u + e;
            }
            let mut out = Vec::with_capacity(cfg.n);
            for &e in eps.iter().skip(trunc).take(cfg.n) {
                u = psi * u + e;
                out.push(u);
            }
            Ok(out)
        }
        ErrorSpec::Ma1 { mu, theta } => {
            let mut out = Vec::with_capacity(cfg.n);
            for j in 0..cfg.n {
                let idx = trunc + j;
                out.push(mu + eps[idx] + theta * eps[idx - 1]);
            }
            Ok(out)
        }
    }
}

/// Build a full series under trend `f`: `x` is the cumulative sum of the
/// shocks and `y_k = f(x_k) + σ u_k`; the raw error channel is retained.
pub fn build_series<F: Fn(f64) -> f64>(cfg: &ProcessConfig, f: F) -> Result<SeriesPair> {
    cfg.validate()?;
    let innov = gen_innovations(cfg.n, cfg.trunc, cfg.r, cfg.seed)?;
    let shocks = gen_shocks(cfg, &innov)?;
    let u = gen_errors(cfg, &innov)?;
    let mut x = Vec::with_capacity(cfg.n);
    let mut acc = 0.0;
    for s in &shocks {
        acc += s;
        x.push(acc);
    }
    let y: Vec<f64> = x
        .iter()
        .zip(&u)
        .map(|(&xk, &uk)| f(xk) + cfg.sigma * uk)
        .collect();
    Ok(SeriesPair { x, y, u: Some(u) })
}

/// The constant `c_d = 1/(d(1+2d)) ∫_0^∞ {x(x+1)}^{−(1−d)} dx` appearing in
/// the LM scaling `d_N ~ N^{d+1/2} √c_d`.
///
/// The integral is evaluated by adaptive quadrature after substitutions that
/// remove the endpoint singularity at 0 and map the tail onto a finite
/// interval: on (0,1), `x = u^{1/d}` gives `(1/d)∫_0^1 (1+u^{1/d})^{d−1} du`;
/// on (1,∞), `x = w^{−s}` with `s = 1/(1−2d)` gives
/// `s∫_0^1 (1+w^s)^{−(1−d)} dw`. Relative error is well below 1e−8.
pub fn c_d_constant(d: f64) -> Result<f64> {
    let (head, tail) = c_d_integral_pieces(d)?;
    Ok((head + tail) / (d * (1.0 + 2.0 * d)))
}

/// The two halves `∫_0^1` and `∫_1^∞` of the `c_d` integrand, after the
/// substitutions described on [`c_d_constant`].
pub fn c_d_integral_pieces(d: f64) -> Result<(f64, f64)> {
    if !(d > 0.0 && d < 0.5) {
        return Err(Error::Domain(format!(
            "c_d requires 0 < d < 1/2, got d={d}"
        )));
    }
    let inv_d = 1.0 / d;
    let head = adaptive_simpson(&|u: f64| (1.0 + u.powf(inv_d)).powf(d - 1.0), 0.0, 1.0, 1e-13)
        / d;
    let s = 1.0 / (1.0 - 2.0 * d);
    let tail =
        s * adaptive_simpson(&|w: f64| (1.0 + w.powf(s)).powf(d - 1.0), 0.0, 1.0, 1e-13);
    Ok((head, tail))
}

/// Normalization scaling `d_N` for the partial-sum regressor:
/// `N^{d+1/2}·√c_d` under LM and `√N/λ^d` under SLM.
pub fn scaling_dn(kind: MemoryKind, n: usize, d: f64, lambda: f64) -> Result<f64> {
    let n_f = n as f64;
    match kind {
        MemoryKind::Lm => {
            let c = c_d_constant(d)?;
            Ok(n_f.powf(d + 0.5) * c.sqrt())
        }
        MemoryKind::Slm => {
            if d <= 0.0 {
                return Err(Error::Domain(format!("SLM scaling requires d > 0, got {d}")));
            }
            if lambda <= 0.0 {
                return Err(Error::Domain(format!(
                    "SLM scaling requires lambda > 0, got {lambda}"
                )));
            }
            Ok(n_f.sqrt() / lambda.powf(d))
        }
    }
}
