//! Monte Carlo size/power experiments: generating-model catalog, replication
//! loop, and rejection-rate tables.
//!
//! Replications are embarrassingly parallel; each owns an RNG stream seeded
//! by mixing the cell's base seed with the replication index, so results are
//! independent of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BandwidthRule;
use crate::models::{fit, nonparametric_residuals, residuals, ModelFamily};
use crate::processes::{
    build_series, gen_errors, gen_innovations, gen_shocks, CoeffKind, ErrorSpec, MemoryKind,
    ProcessConfig, SeriesPair,
};
use crate::stat_tests::{
    mhm_normalize, mhm_statistic, portmanteau, snu_statistic, WeightWindow, DEFAULT_GRID_POINTS,
};
use crate::subsampling::{
    debias_mhm, debiased_mhm_pvalue, max_subsamples, pvalue_snu, subsample_snu_with,
    BlockResiduals,
};

/// SplitMix64 finalizer, used to decorrelate per-replication seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of a cell with the given base seed.
pub fn rep_seed(base_seed: u64, rep: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(rep.wrapping_add(1)))
}

/// Generating-model catalog: the basic linear null, a shrinking local
/// alternative, nonintegrable departures from the linear null, the integrable
/// exponential null, and departures from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case")]
pub enum GenModel {
    /// `y = θ0 + θ1 x + σu`
    NullLinear,
    /// `y = θ0 + θ1 x + ρ_N |x|^ν + σu` with `ρ_N = 1/(N^{1/4+ν/3} h^{1/4})`
    LocalAlt { nu: f64 },
    /// `y = θ0 + θ1 x + 0.5 |x|² I(|x|≤10) + σu`
    B2,
    /// `y = θ0 + θ1 x + 20 exp(−x²) + σu`
    B3,
    /// `y = θ0 + θ1 x + 0.1 |x| + σu`
    B4,
    /// `y = θ0 + θ1 x + 0.1 |x|² + σu`
    B5,
    /// `y = exp(−θ1 |x|) + σu`
    NullExp,
    /// `y = exp(−θ1 |x|) + 0.5 |x|² I(|x|≤10) + σu`
    B7,
    /// `y = exp(−θ1 |x|) + 20 exp(−x²) + σu`
    B8,
    /// `y = exp(−θ1 |x|) + 0.1 |x| + σu`
    B9,
    /// `y = exp(−θ1 |x|) + 0.1 |x|² + σu`
    B10,
}

impl GenModel {
    /// Number of generation parameters `θ` the model consumes.
    pub fn theta_arity(&self) -> usize {
        match self {
            GenModel::NullLinear
            | GenModel::LocalAlt { .. }
            | GenModel::B2
            | GenModel::B3
            | GenModel::B4
            | GenModel::B5 => 2,
            _ => 1,
        }
    }

    /// The natural hypothesis family for this generating model.
    pub fn default_hypothesis(&self) -> ModelFamily {
        match self.theta_arity() {
            2 => ModelFamily::Linear,
            _ => ModelFamily::ExpIntegrable,
        }
    }
}

/// Response under a catalog model: the trend formula evaluated on `x` plus
/// `σu`. The bandwidth `h` enters only through the local alternative's
/// shrinking amplitude.
pub fn gen_response(
    model: GenModel,
    x: &[f64],
    u: &[f64],
    sigma: f64,
    theta: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    if x.len() != u.len() {
        return Err(Error::Length(format!(
            "x and u lengths differ: {} vs {}",
            x.len(),
            u.len()
        )));
    }
    if theta.len() != model.theta_arity() {
        return Err(Error::Usage(format!(
            "{model:?} takes {} generation parameters, got {}",
            model.theta_arity(),
            theta.len()
        )));
    }
    let n = x.len() as f64;
    let trend: Box<dyn Fn(f64) -> f64> = match model {
        GenModel::NullLinear => {
            let (t0, t1) = (theta[0], theta[1]);
            Box::new(move |x| t0 + t1 * x)
        }
        GenModel::LocalAlt { nu } => {
            if !(h > 0.0) {
                return Err(Error::Domain(format!(
                    "local alternative needs a positive bandwidth, got {h}"
                )));
            }
            let rho = 1.0 / (n.powf(0.25 + nu / 3.0) * h.powf(0.25));
            let (t0, t1) = (theta[0], theta[1]);
            Box::new(move |x| t0 + t1 * x + rho * x.abs().powf(nu))
        }
        GenModel::B2 => {
            let (t0, t1) = (theta[0], theta[1]);
            Box::new(move |x: f64| {
                let bump = if x.abs() <= 10.0 { 0.5 * x * x } else { 0.0 };
                t0 + t1 * x + bump
            })
        }
        GenModel::B3 => {
            let (t0, t1) = (theta[0], theta[1]);
            Box::new(move |x: f64| t0 + t1 * x + 20.0 * (-x * x).exp())
        }
        GenModel::B4 => {
            let (t0, t1) = (theta[0], theta[1]);
            Box::new(move |x: f64| t0 + t1 * x + 0.1 * x.abs())
        }
        GenModel::B5 => {
            let (t0, t1) = (theta[0], theta[1]);
            Box::new(move |x: f64| t0 + t1 * x + 0.1 * x * x)
        }
        GenModel::NullExp => {
            let t1 = theta[0];
            Box::new(move |x: f64| (-t1 * x.abs()).exp())
        }
        GenModel::B7 => {
            let t1 = theta[0];
            Box::new(move |x: f64| {
                let bump = if x.abs() <= 10.0 { 0.5 * x * x } else { 0.0 };
                (-t1 * x.abs()).exp() + bump
            })
        }
        GenModel::B8 => {
            let t1 = theta[0];
            Box::new(move |x: f64| (-t1 * x.abs()).exp() + 20.0 * (-x * x).exp())
        }
        GenModel::B9 => {
            let t1 = theta[0];
            Box::new(move |x: f64| (-t1 * x.abs()).exp() + 0.1 * x.abs())
        }
        GenModel::B10 => {
            let t1 = theta[0];
            Box::new(move |x: f64| (-t1 * x.abs()).exp() + 0.1 * x * x)
        }
    };
    Ok(x.iter()
        .zip(u)
        .map(|(&xk, &uk)| trend(xk) + sigma * uk)
        .collect())
}

/// Which residuals feed the subsample blocks (the full-sample statistic
/// always uses the parametric residuals of the tested hypothesis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidualSource {
    #[default]
    Parametric,
    Nonparametric,
}

/// Test procedure run inside an experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestSpec {
    /// SNU with subsampling; one column per block length.
    Snu {
        #[serde(default)]
        residuals: ResidualSource,
    },
    /// De-biased MHM with subsampling; one column per block length.
    MhmDebiased,
    /// Portmanteau with chi-squared calibration; one column per lag count.
    Portmanteau { p: usize, lags: Vec<usize> },
}

/// Process parameters of a cell (everything in [`ProcessConfig`] except the
/// per-replication seed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessTemplate {
    pub kind: MemoryKind,
    pub d: f64,
    #[serde(default)]
    pub lambda: f64,
    pub r: f64,
    pub error_spec: ErrorSpec,
    pub sigma: f64,
    pub n: usize,
    #[serde(default = "default_trunc")]
    pub trunc: usize,
    #[serde(default)]
    pub coeffs: CoeffKind,
}

fn default_trunc() -> usize {
    1000
}

impl ProcessTemplate {
    pub fn instantiate(&self, seed: u64) -> ProcessConfig {
        ProcessConfig {
            kind: self.kind,
            d: self.d,
            lambda: self.lambda,
            r: self.r,
            error_spec: self.error_spec,
            sigma: self.sigma,
            n: self.n,
            trunc: self.trunc,
            coeffs: self.coeffs,
            seed,
        }
    }
}

/// One experiment cell: a generating design, a hypothesis, a test, and the
/// replication setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub label: String,
    pub process: ProcessTemplate,
    pub gen_model: GenModel,
    #[serde(default)]
    pub gen_theta: Vec<f64>,
    pub hypothesis: ModelFamily,
    pub test: TestSpec,
    /// Block lengths for subsampling tests; empty means `[c√N]` for
    /// `c = 0.5, 1, 2, 4`.
    #[serde(default)]
    pub blocks: Vec<usize>,
    pub reps: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub base_seed: u64,
    /// Full-sample and per-block bandwidth rule.
    #[serde(default = "default_bandwidth")]
    pub bandwidth: BandwidthRule,
    /// Subsample count per block; `None` uses the maximal `N − b + 1`.
    #[serde(default)]
    pub subsamples: Option<usize>,
    /// Half-width of the MHM weight window.
    #[serde(default = "default_window")]
    pub window_halfwidth: f64,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_bandwidth() -> BandwidthRule {
    BandwidthRule::Power
}

fn default_window() -> f64 {
    100.0
}

fn default_grid() -> usize {
    DEFAULT_GRID_POINTS
}

/// Block lengths `⌊c√N⌋` for `c = 0.5, 1, 2, 4`.
pub fn default_blocks(n: usize) -> Vec<usize> {
    let root = (n as f64).sqrt();
    [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|c| (c * root).floor() as usize)
        .collect()
}

impl ExperimentConfig {
    /// Resolved generation parameters: explicit `gen_theta`, or the design
    /// defaults `(0, 1)` / `(1)` used throughout the simulation studies.
    pub fn resolved_theta(&self) -> Vec<f64> {
        if !self.gen_theta.is_empty() {
            return self.gen_theta.clone();
        }
        match self.gen_model.theta_arity() {
            2 => vec![0.0, 1.0],
            _ => vec![1.0],
        }
    }

    /// Block lengths actually used by subsampling tests.
    pub fn resolved_blocks(&self) -> Vec<usize> {
        if self.blocks.is_empty() {
            default_blocks(self.process.n)
        } else {
            self.blocks.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::Usage("reps must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Usage(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        self.process.instantiate(0).validate()?;
        let theta = self.resolved_theta();
        if theta.len() != self.gen_model.theta_arity() {
            return Err(Error::Usage(format!(
                "gen_theta has {} entries, {:?} takes {}",
                theta.len(),
                self.gen_model,
                self.gen_model.theta_arity()
            )));
        }
        let n = self.process.n;
        if matches!(self.test, TestSpec::Snu { .. } | TestSpec::MhmDebiased) {
            for &b in &self.resolved_blocks() {
                if b < 2 || b >= n {
                    return Err(Error::Usage(format!(
                        "block length {b} outside [2, {}]",
                        n - 1
                    )));
                }
            }
        }
        if let TestSpec::Portmanteau { p, ref lags } = self.test {
            for &lag in lags {
                if lag <= p {
                    return Err(Error::Usage(format!("lag {lag} must exceed p={p}")));
                }
            }
        }
        Ok(())
    }

    /// Human-readable column labels, one per rejection-rate entry.
    pub fn column_labels(&self) -> Vec<String> {
        match &self.test {
            TestSpec::Portmanteau { lags, .. } => {
                lags.iter().map(|l| format!("L={l}")).collect()
            }
            _ => self
                .resolved_blocks()
                .iter()
                .map(|b| format!("b={b}"))
                .collect(),
        }
    }

    fn test_name(&self) -> String {
        match &self.test {
            TestSpec::Snu { residuals } => match residuals {
                ResidualSource::Parametric => "SNU/parametric".into(),
                ResidualSource::Nonparametric => "SNU/nonparametric".into(),
            },
            TestSpec::MhmDebiased => "MHM-debiased".into(),
            TestSpec::Portmanteau { p, .. } => format!("P(p={p})"),
        }
    }
}

/// One row of a rejection table: a single (cell, column) rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionRow {
    pub label: String,
    pub test: String,
    pub memory: MemoryKind,
    pub d: f64,
    pub r: f64,
    pub column: String,
    pub rate: f64,
    pub attempted: usize,
    pub failed: usize,
}

/// Rejection rates across cells, plus any accumulated warnings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RejectionTable {
    pub rows: Vec<RejectionRow>,
    pub warnings: Vec<String>,
}

impl RejectionTable {
    /// Aligned text rendering (test × column × memory kind × d × r).
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<28} {:<18} {:<6} {:>5} {:>5} {:>8} {:>8} {:>7}\n",
            "label", "test", "memory", "d", "r", "column", "rate", "failed"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<28} {:<18} {:<6} {:>5} {:>5} {:>8} {:>8.3} {:>7}\n",
                row.label,
                row.test,
                match row.memory {
                    MemoryKind::Lm => "lm",
                    MemoryKind::Slm => "slm",
                },
                row.d,
                row.r,
                row.column,
                row.rate,
                row.failed
            ));
        }
        out
    }
}

/// Proportion of p-values at or below the level: `#{P_m ≤ α}/count`.
pub fn rejection_rate(pvalues: &[f64], alpha: f64) -> f64 {
    if pvalues.is_empty() {
        return f64::NAN;
    }
    pvalues.iter().filter(|p| **p <= alpha).count() as f64 / pvalues.len() as f64
}

/// Per-replication p-values for each column of the cell.
fn replicate(cfg: &ExperimentConfig, rep: u64) -> Result<Vec<f64>> {
    let seed = rep_seed(cfg.base_seed, rep);
    let process = cfg.process.instantiate(seed);
    process.validate()?;
    let innov = gen_innovations(process.n, process.trunc, process.r, seed)?;
    let shocks = gen_shocks(&process, &innov)?;
    let u = gen_errors(&process, &innov)?;
    let mut x = Vec::with_capacity(process.n);
    let mut acc = 0.0;
    for s in &shocks {
        acc += s;
        x.push(acc);
    }
    let h = cfg.bandwidth.bandwidth(process.n)?;
    let theta = cfg.resolved_theta();
    let y = gen_response(cfg.gen_model, &x, &u, process.sigma, &theta, h)?;

    let fitted = fit(cfg.hypothesis, &x, &y, None)?;
    let uhat = residuals(&fitted, &x, &y);
    let window = WeightWindow::symmetric(cfg.window_halfwidth)?;

    match &cfg.test {
        TestSpec::Portmanteau { p, lags } => {
            let mut pvals = Vec::with_capacity(lags.len());
            for &lag in lags {
                let outcome = portmanteau(&uhat, *p, lag)?;
                pvals.push(outcome.pvalue.expect("portmanteau always sets a p-value"));
            }
            Ok(pvals)
        }
        TestSpec::Snu { residuals: source } => {
            let z_n = snu_statistic(&uhat, &x, h)?.z_value()?;
            // parametric blocks refit the hypothesis (the length-b analog of
            // the full statistic); nonparametric blocks slice the full-data
            // kernel-smoothing residuals
            let np_resid;
            let resid = match source {
                ResidualSource::Parametric => BlockResiduals::Refit {
                    family: cfg.hypothesis,
                    y: &y,
                },
                ResidualSource::Nonparametric => {
                    np_resid = nonparametric_residuals(&x, &y, h)?;
                    BlockResiduals::Sliced(&np_resid)
                }
            };
            let blocks = cfg.resolved_blocks();
            let mut pvals = Vec::with_capacity(blocks.len());
            for &b in &blocks {
                let m = cfg
                    .subsamples
                    .unwrap_or_else(|| max_subsamples(process.n, b))
                    .min(max_subsamples(process.n, b));
                // block statistics keep the full-sample kernel scale
                let dist = subsample_snu_with(&x, &resid, b, m, BandwidthRule::Fixed { h })?;
                pvals.push(pvalue_snu(z_n, &dist));
            }
            Ok(pvals)
        }
        TestSpec::MhmDebiased => {
            let resid = BlockResiduals::Refit {
                family: cfg.hypothesis,
                y: &y,
            };
            let report = debias_mhm(
                &x,
                &uhat,
                &resid,
                process.kind,
                process.d,
                process.lambda,
                cfg.bandwidth,
                window,
                cfg.grid_points,
            )?;
            let blocks = cfg.resolved_blocks();
            let mut pvals = Vec::with_capacity(blocks.len());
            for &b in &blocks {
                let m = cfg
                    .subsamples
                    .map(|m| m.min(max_subsamples(process.n, b)));
                let p = debiased_mhm_pvalue(
                    &x,
                    &resid,
                    b,
                    m,
                    cfg.bandwidth,
                    process.kind,
                    process.d,
                    process.lambda,
                    window,
                    cfg.grid_points,
                    &report,
                )?;
                pvals.push(p);
            }
            Ok(pvals)
        }
    }
}

/// Run one experiment cell: `reps` replications, each generating a series,
/// fitting the hypothesis, and recording `P_m ≤ α` per column. Failed
/// replications are excluded (warning above 1%, error above 5%).
pub fn run_cell(cfg: &ExperimentConfig) -> Result<RejectionTable> {
    cfg.validate()?;
    let columns = cfg.column_labels();
    let outcomes: Vec<Result<Vec<f64>>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| replicate(cfg, rep))
        .collect();
    let mut per_column: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.reps); columns.len()];
    let mut failed = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(pvals) => {
                for (col, p) in pvals.into_iter().enumerate() {
                    per_column[col].push(p);
                }
            }
            Err(_) => failed += 1,
        }
    }
    let failure_rate = failed as f64 / cfg.reps as f64;
    if failure_rate > 0.05 {
        return Err(Error::Cell(format!(
            "cell '{}': {failed} of {} replications failed",
            cfg.label, cfg.reps
        )));
    }
    let mut warnings = Vec::new();
    if failure_rate > 0.01 {
        warnings.push(format!(
            "cell '{}': {failed} of {} replications failed and were excluded",
            cfg.label, cfg.reps
        ));
    }
    let rows = columns
        .into_iter()
        .enumerate()
        .map(|(idx, column)| RejectionRow {
            label: cfg.label.clone(),
            test: cfg.test_name(),
            memory: cfg.process.kind,
            d: cfg.process.d,
            r: cfg.process.r,
            column,
            rate: rejection_rate(&per_column[idx], cfg.alpha),
            attempted: cfg.reps,
            failed,
        })
        .collect();
    Ok(RejectionTable { rows, warnings })
}

/// Run a list of cells and concatenate their tables.
pub fn run_suite(cells: &[ExperimentConfig]) -> Result<RejectionTable> {
    let mut table = RejectionTable::default();
    for cell in cells {
        let mut t = run_cell(cell)?;
        table.rows.append(&mut t.rows);
        table.warnings.append(&mut t.warnings);
    }
    Ok(table)
}

/// Statistic whose raw Monte Carlo samples can be dumped for external
/// plotting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStatistic {
    /// Normalized MHM statistic `τ_N^{−1} T_N`.
    MhmNormalized,
    /// SNU statistic `Z_N`.
    SnuZ,
}

/// Raw full-sample statistic values across replications of a generating
/// design, for density plots and location diagnostics. Replications with a
/// degenerate statistic are skipped (same 5% failure budget as `run_cell`).
#[allow(clippy::too_many_arguments)]
pub fn statistic_samples(
    process: &ProcessTemplate,
    gen_model: GenModel,
    gen_theta: &[f64],
    hypothesis: ModelFamily,
    stat: SampleStatistic,
    reps: usize,
    base_seed: u64,
    bandwidth: BandwidthRule,
) -> Result<Vec<f64>> {
    let window = WeightWindow::standard();
    let outcomes: Vec<Result<f64>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let seed = rep_seed(base_seed, rep);
            let cfg = process.instantiate(seed);
            cfg.validate()?;
            let innov = gen_innovations(cfg.n, cfg.trunc, cfg.r, seed)?;
            let shocks = gen_shocks(&cfg, &innov)?;
            let u = gen_errors(&cfg, &innov)?;
            let mut x = Vec::with_capacity(cfg.n);
            let mut acc = 0.0;
            for s in &shocks {
                acc += s;
                x.push(acc);
            }
            let h = bandwidth.bandwidth(cfg.n)?;
            let y = gen_response(gen_model, &x, &u, cfg.sigma, gen_theta, h)?;
            let fitted = fit(hypothesis, &x, &y, None)?;
            let uhat = residuals(&fitted, &x, &y);
            match stat {
                SampleStatistic::MhmNormalized => {
                    let t = mhm_statistic(&uhat, &x, h, window, DEFAULT_GRID_POINTS)?;
                    mhm_normalize(t, cfg.n, h, cfg.kind, cfg.d, cfg.lambda)
                }
                SampleStatistic::SnuZ => snu_statistic(&uhat, &x, h)?.z_value(),
            }
        })
        .collect();
    let mut samples = Vec::with_capacity(reps);
    let mut failed = 0usize;
    for o in outcomes {
        match o {
            Ok(v) => samples.push(v),
            Err(_) => failed += 1,
        }
    }
    if failed as f64 > 0.05 * reps as f64 {
        return Err(Error::Cell(format!(
            "{failed} of {reps} statistic samples failed"
        )));
    }
    Ok(samples)
}

/// Length of the AR-misspecification demonstration series.
pub const MISSPEC_N: usize = 80;
/// Seed of the shipped demonstration fixture.
pub const MISSPEC_FIXTURE_SEED: u64 = 71;
/// Noise variance of the demonstration series (standard deviation √0.025).
pub const MISSPEC_NOISE_VAR: f64 = 0.025;

/// Synthetic demonstration of portmanteau fragility under a highly nonlinear
/// trend with white-noise errors: `y_k = γ + (α x_k − β) e^{−α x_k} + u_k`
/// with `(α, β, γ) = (0.55, 0.60, 5)`, `u_k ~ N(0, 0.025)` i.i.d. white
/// noise, and the regressor a fixed grid of constants `x_k = k/4`,
/// `k = 1..80`.
pub fn ar_misspecification_series(seed: u64) -> SeriesPair {
    let (alpha, beta, gamma) = (0.55, 0.60, 5.0);
    let noise_sd = MISSPEC_NOISE_VAR.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(MISSPEC_N);
    let mut y = Vec::with_capacity(MISSPEC_N);
    let mut u = Vec::with_capacity(MISSPEC_N);
    for k in 1..=MISSPEC_N {
        let xk = k as f64 * 0.25;
        let trend = gamma + (alpha * xk - beta) * (-alpha * xk).exp();
        let z: f64 = StandardNormal.sample(&mut rng);
        x.push(xk);
        u.push(z);
        y.push(trend + noise_sd * z);
    }
    SeriesPair { x, y, u: Some(u) }
}

/// Simulate the full series of a cell's generating design (one replication).
pub fn simulate_cell_series(cfg: &ExperimentConfig, rep: u64) -> Result<SeriesPair> {
    let seed = rep_seed(cfg.base_seed, rep);
    let process = cfg.process.instantiate(seed);
    let h = cfg.bandwidth.bandwidth(process.n)?;
    let theta = cfg.resolved_theta();
    // build via the shared path, then overwrite y with the catalog response
    let mut sp = build_series(&process, |x| x)?;
    let u = sp.u.clone().expect("simulated series keeps its error channel");
    sp.y = gen_response(cfg.gen_model, &sp.x, &u, process.sigma, &theta, h)?;
    Ok(sp)
}
