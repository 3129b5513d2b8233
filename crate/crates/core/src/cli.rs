//! Command-line surface: argument definitions and command implementations.
//!
//! Subcommands: `simulate | test | scan-blocks | bandwidth | mc`. Every
//! command writes its primary output plus a `<output>.manifest.json`
//! capturing the fully resolved configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{
    read_dataset, read_simulate_config, read_suite_config, write_bandwidth_curve_csv,
    write_curve_csv, write_jsonl, write_rejection_csv, write_samples_csv, write_series_csv,
    Dataset, RunManifest,
};
use crate::kernel::{default_bandwidth_grid, select_bandwidth, BandwidthRule};
use crate::models::{fit, nonparametric_residuals, residuals, ModelFamily};
use crate::montecarlo::{gen_response, statistic_samples, run_suite, ResidualSource};
use crate::processes::{build_series, MemoryKind};
use crate::stat_tests::{
    mhm_normalize, mhm_statistic, portmanteau, snu_statistic, TestMeta, TestOutcome,
    WeightWindow, DEFAULT_GRID_POINTS,
};
use crate::subsampling::{
    block_scan, debias_mhm, debiased_mhm_pvalue, max_subsamples, minimal_volatility, pvalue_snu,
    subsample_snu_with, BlockResiduals, ScanStatistic,
};

/// Minimum dataset size accepted by the test commands.
const MIN_TEST_ROWS: usize = 10;

#[derive(Parser, Debug)]
#[command(
    name = "cointest",
    version,
    about = "Specification tests for nonparametric cointegrating regression with \
             long-memory/semi-long-memory regressors, using subsampling reference distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a series from a process/model config and write it as CSV.
    Simulate(SimulateArgs),
    /// Fit a hypothesis on a dataset and run a specification test.
    Test(TestArgs),
    /// P-value versus block length for a dataset and hypothesis.
    ScanBlocks(ScanArgs),
    /// Leave-one-out cross-validated bandwidth selection.
    Bandwidth(BandwidthArgs),
    /// Run a Monte Carlo suite of size/power cells.
    Mc(McArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// TOML config with [process] and [model] sections.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV path (k,x,y,u).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HypothesisArg {
    Linear,
    Quadratic,
    Exp,
}

impl From<HypothesisArg> for ModelFamily {
    fn from(h: HypothesisArg) -> Self {
        match h {
            HypothesisArg::Linear => ModelFamily::Linear,
            HypothesisArg::Quadratic => ModelFamily::Quadratic,
            HypothesisArg::Exp => ModelFamily::ExpIntegrable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKind {
    Snu,
    Mhm,
    Portmanteau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResidualsArg {
    Parametric,
    Nonparametric,
}

impl From<ResidualsArg> for ResidualSource {
    fn from(r: ResidualsArg) -> Self {
        match r {
            ResidualsArg::Parametric => ResidualSource::Parametric,
            ResidualsArg::Nonparametric => ResidualSource::Nonparametric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MemoryArg {
    Lm,
    Slm,
}

impl From<MemoryArg> for MemoryKind {
    fn from(m: MemoryArg) -> Self {
        match m {
            MemoryArg::Lm => MemoryKind::Lm,
            MemoryArg::Slm => MemoryKind::Slm,
        }
    }
}

/// Shared dataset flags.
#[derive(Args, Debug)]
pub struct DataArgs {
    /// Input dataset CSV with header and (index, x, y) columns.
    #[arg(long)]
    pub data: PathBuf,
    /// Apply a natural log to the x column on ingest.
    #[arg(long)]
    pub log_x: bool,
    /// Apply a natural log to the y column on ingest.
    #[arg(long)]
    pub log_y: bool,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Hypothesized regression family.
    #[arg(long, value_enum)]
    pub hypothesis: HypothesisArg,
    /// Which test statistic to run.
    #[arg(long, value_enum)]
    pub test: TestKind,
    /// Block lengths for subsampling tests (comma separated).
    #[arg(long, alias = "block", value_delimiter = ',')]
    pub blocks: Vec<usize>,
    /// Bandwidth rule: "power" (n^{-1/3}) or "fixed:<h>".
    #[arg(long, default_value = "power", value_parser = parse_bandwidth_rule)]
    pub bandwidth_rule: BandwidthRule,
    /// Residual source for the subsample blocks.
    #[arg(long, value_enum, default_value_t = ResidualsArg::Parametric)]
    pub residuals: ResidualsArg,
    /// Memory kind of the regressor shocks (MHM only).
    #[arg(long, value_enum)]
    pub memory: Option<MemoryArg>,
    /// Fractional differencing parameter d (MHM only).
    #[arg(long)]
    pub d: Option<f64>,
    /// Tempering parameter lambda (MHM under SLM only).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Half-width of the MHM weight window.
    #[arg(long, default_value_t = 100.0)]
    pub window: f64,
    /// MHM quadrature grid points.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Run the plain (non-debiased) MHM instead of the de-biased procedure.
    #[arg(long)]
    pub no_debias: bool,
    /// AR order for the portmanteau test.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// Lag counts L for the portmanteau test (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "6,12,18")]
    pub lags: Vec<usize>,
    /// Output JSON-lines path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub hypothesis: HypothesisArg,
    /// Block range "lo:hi" or "lo:step:hi".
    #[arg(long, value_parser = parse_range)]
    pub b_range: RangeSpec,
    #[arg(long, default_value = "power", value_parser = parse_bandwidth_rule)]
    pub bandwidth_rule: BandwidthRule,
    /// Residual source for the subsample blocks.
    #[arg(long, value_enum, default_value_t = ResidualsArg::Parametric)]
    pub residuals: ResidualsArg,
    /// Sliding window for the minimal-volatility report.
    #[arg(long, default_value_t = 5)]
    pub min_vol_window: usize,
    /// Output curve CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BandwidthArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Bandwidth grid "start:step:end"; defaults to 200 log-spaced points
    /// over [0.01, 1] times the regressor range.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<GridSpec>,
    /// Output curve CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct McArgs {
    /// TOML suite config with [[cell]] tables.
    #[arg(long)]
    pub config: PathBuf,
    /// Override every cell's base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override every cell's replication count (e.g. 2000 for full-size runs).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Override every cell's nominal level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output rejection-table CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write raw statistic samples for [[dump]] entries
    /// (default: alongside --out).
    #[arg(long)]
    pub dump_stats: Option<PathBuf>,
    /// Also print the aligned-text table to stdout.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeSpec {
    pub lo: usize,
    pub step: usize,
    pub hi: usize,
}

fn parse_range(s: &str) -> std::result::Result<RangeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let parse = |p: &str| p.parse::<usize>().map_err(|_| format!("bad integer '{p}'"));
    match parts.as_slice() {
        [lo, hi] => Ok(RangeSpec {
            lo: parse(lo)?,
            step: 1,
            hi: parse(hi)?,
        }),
        [lo, step, hi] => Ok(RangeSpec {
            lo: parse(lo)?,
            step: parse(step)?,
            hi: parse(hi)?,
        }),
        _ => Err("expected lo:hi or lo:step:hi".into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub end: f64,
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:step:end".into());
    }
    let parse = |p: &str| p.parse::<f64>().map_err(|_| format!("bad float '{p}'"));
    let spec = GridSpec {
        start: parse(parts[0])?,
        step: parse(parts[1])?,
        end: parse(parts[2])?,
    };
    if !(spec.start > 0.0 && spec.step > 0.0 && spec.end >= spec.start) {
        return Err("grid requires 0 < start <= end and step > 0".into());
    }
    Ok(spec)
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let count = ((self.end - self.start) / self.step).round() as usize;
        for i in 0..=count {
            let h = self.start + i as f64 * self.step;
            if h <= self.end + 1e-12 * self.step {
                out.push(h);
            }
        }
        out
    }
}

fn parse_bandwidth_rule(s: &str) -> std::result::Result<BandwidthRule, String> {
    if s == "power" {
        return Ok(BandwidthRule::Power);
    }
    if let Some(rest) = s.strip_prefix("fixed:") {
        let h = rest
            .parse::<f64>()
            .map_err(|_| format!("bad bandwidth '{rest}'"))?;
        if h <= 0.0 {
            return Err("fixed bandwidth must be positive".into());
        }
        return Ok(BandwidthRule::Fixed { h });
    }
    Err("expected 'power' or 'fixed:<h>'".into())
}

/// Run a parsed command; returns the process exit code.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Test(args) => cmd_test(&args),
        Command::ScanBlocks(args) => cmd_scan_blocks(&args),
        Command::Bandwidth(args) => cmd_bandwidth(&args),
        Command::Mc(args) => cmd_mc(&args),
    }
}

fn load_test_dataset(data: &DataArgs) -> Result<Dataset> {
    let ds = read_dataset(&data.data, data.log_x, data.log_y)?;
    if ds.len() < MIN_TEST_ROWS {
        return Err(Error::Data(format!(
            "test commands need at least {MIN_TEST_ROWS} rows, got {}",
            ds.len()
        )));
    }
    Ok(ds)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = read_simulate_config(&args.config)?;
    let process = cfg.process.to_config(args.seed);
    process.validate()?;
    let h = BandwidthRule::Power.bandwidth(process.n)?;
    let theta = if cfg.model.theta.is_empty() {
        match cfg.model.gen.theta_arity() {
            2 => vec![0.0, 1.0],
            _ => vec![1.0],
        }
    } else {
        cfg.model.theta.clone()
    };
    // regressors and errors from the shared generator, response from the catalog
    let mut series = build_series(&process, |x| x)?;
    let u = series.u.clone().expect("simulated series keeps errors");
    series.y = gen_response(cfg.model.gen, &series.x, &u, process.sigma, &theta, h)?;
    write_series_csv(&args.out, &series)?;
    let manifest = RunManifest::new(
        "simulate",
        serde_json::json!({
            "config": cfg,
            "resolved_seed": process.seed,
            "resolved_theta": theta,
        }),
        Some(process.seed),
    );
    manifest.write_for(&args.out)?;
    println!(
        "wrote {} rows to {} (seed {})",
        series.len(),
        args.out.display(),
        process.seed
    );
    Ok(())
}

fn mhm_params(args: &TestArgs) -> Result<(MemoryKind, f64, f64)> {
    let memory = args
        .memory
        .ok_or_else(|| Error::Usage("--memory is required for the MHM test".into()))?;
    let d = args
        .d
        .ok_or_else(|| Error::Usage("--d is required for the MHM test".into()))?;
    let lambda = match memory {
        MemoryArg::Lm => args.lambda.unwrap_or(0.0),
        MemoryArg::Slm => args.lambda.ok_or_else(|| {
            Error::Usage("--lambda is required for the MHM test under SLM".into())
        })?,
    };
    Ok((memory.into(), d, lambda))
}

pub fn cmd_test(args: &TestArgs) -> Result<()> {
    let ds = load_test_dataset(&args.data)?;
    let n = ds.len();
    let family: ModelFamily = args.hypothesis.into();
    let fitted = fit(family, &ds.x, &ds.y, None)?;
    let uhat = residuals(&fitted, &ds.x, &ds.y);
    let h = args.bandwidth_rule.bandwidth(n)?;
    let mut outcomes: Vec<TestOutcome> = Vec::new();

    match args.test {
        TestKind::Portmanteau => {
            for &lag in &args.lags {
                outcomes.push(portmanteau(&uhat, args.p, lag)?);
            }
        }
        TestKind::Snu => {
            let blocks = resolved_blocks(&args.blocks, n)?;
            let stat = snu_statistic(&uhat, &ds.x, h)?;
            let z = stat.z_value()?;
            let np_resid;
            let resid = match args.residuals {
                ResidualsArg::Parametric => BlockResiduals::Refit { family, y: &ds.y },
                ResidualsArg::Nonparametric => {
                    np_resid = nonparametric_residuals(&ds.x, &ds.y, h)?;
                    BlockResiduals::Sliced(&np_resid)
                }
            };
            for &b in &blocks {
                let m = max_subsamples(n, b);
                // block statistics keep the full-sample kernel scale
                let dist = subsample_snu_with(&ds.x, &resid, b, m, BandwidthRule::Fixed { h })?;
                let p = pvalue_snu(z, &dist);
                outcomes.push(TestOutcome {
                    statistic: stat.s,
                    normalized: Some(z),
                    pvalue: Some(p),
                    meta: TestMeta::Snu {
                        h,
                        block: Some(b),
                        subsamples: Some(dist.m),
                        skipped: Some(dist.skipped),
                        residual_source: Some(format!("{:?}", args.residuals).to_lowercase()),
                    },
                });
            }
        }
        TestKind::Mhm => {
            let (kind, d, lambda) = mhm_params(args)?;
            let window = WeightWindow::symmetric(args.window)?;
            let blocks = resolved_blocks(&args.blocks, n)?;
            let t = mhm_statistic(&uhat, &ds.x, h, window, args.grid_points)?;
            let normalized = mhm_normalize(t, n, h, kind, d, lambda)?;
            let tau = n as f64 * h / crate::processes::scaling_dn(kind, n, d, lambda)?;
            let np_resid;
            let resid = match args.residuals {
                ResidualsArg::Parametric => BlockResiduals::Refit { family, y: &ds.y },
                ResidualsArg::Nonparametric => {
                    np_resid = nonparametric_residuals(&ds.x, &ds.y, h)?;
                    BlockResiduals::Sliced(&np_resid)
                }
            };
            if args.no_debias {
                for &b in &blocks {
                    let m = max_subsamples(n, b);
                    let dist = crate::subsampling::subsample_mhm_with(
                        &ds.x,
                        &resid,
                        b,
                        m,
                        args.bandwidth_rule,
                        kind,
                        d,
                        lambda,
                        window,
                        args.grid_points,
                    )?;
                    let p = crate::subsampling::pvalue_mhm(normalized, &dist);
                    outcomes.push(TestOutcome {
                        statistic: t,
                        normalized: Some(normalized),
                        pvalue: Some(p),
                        meta: TestMeta::Mhm {
                            h,
                            tau,
                            block: Some(b),
                            subsamples: Some(dist.m),
                            bias_estimate: None,
                        },
                    });
                }
            } else {
                let report = debias_mhm(
                    &ds.x,
                    &uhat,
                    &resid,
                    kind,
                    d,
                    lambda,
                    args.bandwidth_rule,
                    window,
                    args.grid_points,
                )?;
                for &b in &blocks {
                    let p = debiased_mhm_pvalue(
                        &ds.x,
                        &resid,
                        b,
                        None,
                        args.bandwidth_rule,
                        kind,
                        d,
                        lambda,
                        window,
                        args.grid_points,
                        &report,
                    )?;
                    outcomes.push(TestOutcome {
                        statistic: t,
                        normalized: Some(report.debiased),
                        pvalue: Some(p),
                        meta: TestMeta::Mhm {
                            h,
                            tau,
                            block: Some(b),
                            subsamples: Some(max_subsamples(n, b)),
                            bias_estimate: Some(report.bias_n),
                        },
                    });
                }
            }
        }
    }

    write_jsonl(&args.out, &outcomes)?;
    let manifest = RunManifest::new(
        "test",
        serde_json::json!({
            "data": args.data.data.display().to_string(),
            "log_x": args.data.log_x,
            "log_y": args.data.log_y,
            "hypothesis": family,
            "fitted_params": fitted.params,
            "test": format!("{:?}", args.test),
            "blocks": args.blocks,
            "bandwidth_rule": args.bandwidth_rule,
            "residuals": format!("{:?}", args.residuals),
            "p": args.p,
            "lags": args.lags,
            "window": args.window,
            "grid_points": args.grid_points,
        }),
        None,
    );
    manifest.write_for(&args.out)?;

    println!(
        "{:<14} {:>8} {:>14} {:>14} {:>10}",
        "test", "column", "statistic", "normalized", "pvalue"
    );
    for o in &outcomes {
        let (name, column) = match &o.meta {
            TestMeta::Snu { block, .. } => ("snu", format!("b={}", block.unwrap_or(0))),
            TestMeta::Mhm { block, .. } => ("mhm", format!("b={}", block.unwrap_or(0))),
            TestMeta::Portmanteau { lag, .. } => ("portmanteau", format!("L={lag}")),
        };
        println!(
            "{:<14} {:>8} {:>14.6} {:>14} {:>10.4}",
            name,
            column,
            o.statistic,
            o.normalized
                .map(|v| format!("{v:.6}"))
                .unwrap_or_else(|| "-".into()),
            o.pvalue.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

fn resolved_blocks(blocks: &[usize], n: usize) -> Result<Vec<usize>> {
    let blocks = if blocks.is_empty() {
        crate::montecarlo::default_blocks(n)
    } else {
        blocks.to_vec()
    };
    for &b in &blocks {
        if b < 2 || b >= n {
            return Err(Error::Usage(format!(
                "block length {b} outside [2, {}]",
                n - 1
            )));
        }
    }
    Ok(blocks)
}

pub fn cmd_scan_blocks(args: &ScanArgs) -> Result<()> {
    let ds = load_test_dataset(&args.data)?;
    let n = ds.len();
    let family: ModelFamily = args.hypothesis.into();
    let fitted = fit(family, &ds.x, &ds.y, None)?;
    let uhat = residuals(&fitted, &ds.x, &ds.y);
    let h = args.bandwidth_rule.bandwidth(n)?;
    let z = snu_statistic(&uhat, &ds.x, h)?.z_value()?;
    let np_resid;
    let resid = match args.residuals {
        ResidualsArg::Parametric => BlockResiduals::Refit { family, y: &ds.y },
        ResidualsArg::Nonparametric => {
            np_resid = nonparametric_residuals(&ds.x, &ds.y, h)?;
            BlockResiduals::Sliced(&np_resid)
        }
    };
    let curve = block_scan(
        &ds.x,
        &resid,
        &ScanStatistic::Snu { full_z: z },
        args.b_range.lo,
        args.b_range.hi.min(n - 1),
        args.b_range.step,
        BandwidthRule::Fixed { h },
    )?;
    write_curve_csv(&args.out, &curve)?;
    let manifest = RunManifest::new(
        "scan-blocks",
        serde_json::json!({
            "data": args.data.data.display().to_string(),
            "log_x": args.data.log_x,
            "log_y": args.data.log_y,
            "hypothesis": family,
            "fitted_params": fitted.params,
            "b_range": format!("{}:{}:{}", args.b_range.lo, args.b_range.step, args.b_range.hi),
            "bandwidth_rule": args.bandwidth_rule,
            "residuals": format!("{:?}", args.residuals),
            "full_statistic": z,
        }),
        None,
    );
    manifest.write_for(&args.out)?;

    let complete: Vec<(usize, f64)> = curve
        .iter()
        .filter_map(|(b, p)| p.map(|p| (*b, p)))
        .collect();
    println!(
        "scanned {} block lengths ({} complete) into {}",
        curve.len(),
        complete.len(),
        args.out.display()
    );
    if complete.len() >= args.min_vol_window {
        let b_hat = minimal_volatility(&complete, args.min_vol_window)?;
        let p_hat = complete.iter().find(|(b, _)| *b == b_hat).map(|(_, p)| *p);
        println!(
            "minimal-volatility block: b={b_hat} (p-value {:.4})",
            p_hat.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

pub fn cmd_bandwidth(args: &BandwidthArgs) -> Result<()> {
    let ds = load_test_dataset(&args.data)?;
    let grid = match &args.grid {
        Some(spec) => spec.points(),
        None => default_bandwidth_grid(&ds.x),
    };
    let mut curve = Vec::with_capacity(grid.len());
    for &h in &grid {
        if let Ok(sc) = crate::kernel::lcv_score(&ds.x, &ds.y, h) {
            curve.push((h, sc.score, sc.excluded));
        }
    }
    let (h_opt, score) = select_bandwidth(&ds.x, &ds.y, &grid)?;
    write_bandwidth_curve_csv(&args.out, &curve)?;
    let manifest = RunManifest::new(
        "bandwidth",
        serde_json::json!({
            "data": args.data.data.display().to_string(),
            "log_x": args.data.log_x,
            "log_y": args.data.log_y,
            "grid_points": grid.len(),
            "h_opt": h_opt,
            "lcv": score.score,
            "excluded": score.excluded,
        }),
        None,
    );
    manifest.write_for(&args.out)?;
    println!(
        "h_opt={h_opt:.6} lcv={:.6} excluded={}",
        score.score, score.excluded
    );
    Ok(())
}

pub fn cmd_mc(args: &McArgs) -> Result<()> {
    let mut suite = read_suite_config(&args.config)?;
    for cell in &mut suite.cell {
        if let Some(seed) = args.seed {
            cell.base_seed = seed;
        }
        if let Some(reps) = args.reps {
            cell.reps = reps;
        }
        if let Some(alpha) = args.alpha {
            cell.alpha = alpha;
        }
    }
    let table = run_suite(&suite.cell)?;
    write_rejection_csv(&args.out, &table)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    if !suite.dump.is_empty() {
        let dump_path = args.dump_stats.clone().unwrap_or_else(|| {
            let mut p = args.out.clone();
            p.set_extension("samples.csv");
            p
        });
        let mut blocks = Vec::new();
        for dump in &suite.dump {
            let theta = if dump.gen_theta.is_empty() {
                match dump.gen_model.theta_arity() {
                    2 => vec![0.0, 1.0],
                    _ => vec![1.0],
                }
            } else {
                dump.gen_theta.clone()
            };
            let samples = statistic_samples(
                &dump.process,
                dump.gen_model,
                &theta,
                dump.hypothesis,
                dump.stat,
                dump.reps,
                args.seed.unwrap_or(dump.base_seed),
                BandwidthRule::Power,
            )?;
            blocks.push((dump.label.clone(), samples));
        }
        write_samples_csv(&dump_path, &blocks)?;
        println!("wrote statistic samples to {}", dump_path.display());
    }
    let manifest = RunManifest::new(
        "mc",
        serde_json::json!({
            "config": suite,
            "seed_override": args.seed,
        }),
        args.seed,
    );
    manifest.write_for(&args.out)?;
    if args.text {
        print!("{}", table.render_text());
    }
    println!(
        "wrote {} rejection rows to {}",
        table.rows.len(),
        args.out.display()
    );
    Ok(())
}

/// Entry point used by the binary: parse, run, map errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
