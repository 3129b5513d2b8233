//! Regressor-reset subsample blocks, subsample reference distributions for
//! the SNU and MHM statistics, p-values, the de-biased MHM procedure, and
//! minimal-volatility block selection.
//!
//! A length-`b` block starting at index `i` carries the regressors shifted by
//! the pre-block level, `x_{i+j−1} − x_{i−1}` (with `x_0 = 0`), so that blocks
//! are distributional mini-copies of the nonstationary partial-sum path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BandwidthRule;
use crate::models::{fit, residuals as model_residuals, ModelFamily};
use crate::processes::{scaling_dn, MemoryKind};
use crate::stat_tests::{mhm_statistic, mhm_normalize, snu_statistic, WeightWindow};

/// Fraction of degenerate blocks above which a subsample distribution is
/// rejected instead of silently thinned.
const MAX_SKIP_FRACTION: f64 = 0.10;

/// How residuals are obtained on each subsample block.
///
/// `Sliced` takes a window of a residual sequence computed once on the full
/// sample (e.g. full-data kernel-smoothing residuals). `Refit` treats every
/// block as a fresh dataset and re-estimates the hypothesized family on it,
/// which is the length-`b` analog of the full test statistic (whose
/// definition includes the fitting step).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlockResiduals<'a> {
    /// Slice a precomputed residual sequence.
    Sliced(&'a [f64]),
    /// Refit `family` by least squares on each block's `(x, y)` data.
    Refit { family: ModelFamily, y: &'a [f64] },
}

impl BlockResiduals<'_> {
    fn check_len(&self, n: usize) -> Result<()> {
        let len = match self {
            BlockResiduals::Sliced(u) => u.len(),
            BlockResiduals::Refit { y, .. } => y.len(),
        };
        if len != n {
            return Err(Error::Length(format!(
                "regressor and residual-source lengths differ: {n} vs {len}"
            )));
        }
        Ok(())
    }

    /// Residuals of the block `x[i..i+b]` (0-based start). A failed block
    /// fit returns `None`; such blocks are skipped and counted.
    fn block(&self, x: &[f64], i: usize, b: usize) -> Option<Vec<f64>> {
        match self {
            BlockResiduals::Sliced(u) => Some(u[i..i + b].to_vec()),
            BlockResiduals::Refit { family, y } => {
                let xs = &x[i..i + b];
                let ys = &y[i..i + b];
                fit(*family, xs, ys, None)
                    .ok()
                    .map(|m| model_residuals(&m, xs, ys))
            }
        }
    }
}

/// One regressor-reset data block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockView {
    /// 1-based starting index `i`.
    pub start: usize,
    /// Reset regressors `x_{i+j−1} − x_{i−1}`, `j = 1..b`.
    pub reset_x: Vec<f64>,
    /// Residual slice `ũ_i..ũ_{i+b−1}`.
    pub resid: Vec<f64>,
}

/// The first `m` regressor-reset blocks of length `b`.
pub fn build_blocks(x: &[f64], u: &[f64], b: usize, m: usize) -> Result<Vec<BlockView>> {
    let n = x.len();
    if u.len() != n {
        return Err(Error::Length(format!(
            "regressor and residual lengths differ: {n} vs {}",
            u.len()
        )));
    }
    if b < 1 || b > n {
        return Err(Error::Usage(format!("block length {b} outside 1..={n}")));
    }
    if m < 1 || m > n - b + 1 {
        return Err(Error::Usage(format!(
            "subsample count {m} outside 1..={}",
            n - b + 1
        )));
    }
    let mut out = Vec::with_capacity(m);
    for i in 1..=m {
        let base = if i == 1 { 0.0 } else { x[i - 2] };
        let reset_x: Vec<f64> = x[i - 1..i - 1 + b].iter().map(|&v| v - base).collect();
        out.push(BlockView {
            start: i,
            reset_x,
            resid: u[i - 1..i - 1 + b].to_vec(),
        });
    }
    Ok(out)
}

/// Maximal number of length-`b` subsamples of a length-`n` series.
pub fn max_subsamples(n: usize, b: usize) -> usize {
    n.saturating_sub(b) + 1
}

/// Sorted subsample statistic values forming an empirical reference
/// distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleDistribution {
    values: Vec<f64>,
    /// Block length.
    pub b: usize,
    /// Number of subsample statistics retained (attempted − skipped).
    pub m: usize,
    /// Bandwidth used on the blocks.
    pub h_b: f64,
    /// Degenerate blocks that were skipped.
    pub skipped: usize,
}

impl SubsampleDistribution {
    fn from_values(mut values: Vec<f64>, b: usize, h_b: f64, skipped: usize, attempted: usize) -> Result<Self> {
        if values.is_empty() || (skipped as f64) > MAX_SKIP_FRACTION * attempted as f64 {
            return Err(Error::Distribution(format!(
                "{skipped} of {attempted} blocks degenerate (limit {:.0}%)",
                MAX_SKIP_FRACTION * 100.0
            )));
        }
        values.sort_by(|a, b| a.partial_cmp(b).expect("non-finite subsample statistic"));
        let m = values.len();
        Ok(SubsampleDistribution { values, b, m, h_b, skipped })
    }

    /// The sorted statistic values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Empirical CDF `F̂(t)` = proportion of values ≤ `t`.
    pub fn empirical_cdf(&self, t: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v <= t);
        idx as f64 / self.m as f64
    }

    /// Mean of the stored values.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.m as f64
    }
}

/// Subsample distribution of the SNU statistic: `Z_{i,b}` computed on each of
/// the first `m` blocks with bandwidth `h_rule` resolved at `b` (degenerate
/// or unfittable blocks are skipped and counted).
///
/// The SNU block statistic keeps the full-sample kernel scale in the
/// simulation designs, so callers there pass `BandwidthRule::Fixed` with the
/// full-sample `h`; a rule resolved at `b` remains available for experiments.
pub fn subsample_snu_with(
    x: &[f64],
    resid: &BlockResiduals<'_>,
    b: usize,
    m: usize,
    h_rule: BandwidthRule,
) -> Result<SubsampleDistribution> {
    if b < 2 {
        return Err(Error::Usage(format!("SNU subsampling needs b >= 2, got {b}")));
    }
    let n = x.len();
    resid.check_len(n)?;
    if m < 1 || m > max_subsamples(n, b) {
        return Err(Error::Usage(format!(
            "subsample count {m} outside 1..={}",
            max_subsamples(n, b)
        )));
    }
    let h_b = h_rule.bandwidth(b)?;
    let mut values = Vec::with_capacity(m);
    let mut skipped = 0usize;
    for i in 0..m {
        let ub = match resid.block(x, i, b) {
            Some(ub) => ub,
            None => {
                skipped += 1;
                continue;
            }
        };
        // within-block regressor differences are invariant to the reset shift
        let st = snu_statistic(&ub, &x[i..i + b], h_b)?;
        match st.z {
            Some(z) => values.push(z),
            None => skipped += 1,
        }
    }
    SubsampleDistribution::from_values(values, b, h_b, skipped, m)
}

/// [`subsample_snu_with`] over slices of a precomputed residual sequence.
pub fn subsample_snu(
    x: &[f64],
    u: &[f64],
    b: usize,
    m: usize,
    h_rule: BandwidthRule,
) -> Result<SubsampleDistribution> {
    subsample_snu_with(x, &BlockResiduals::Sliced(u), b, m, h_rule)
}

/// Subsample distribution of the normalized MHM statistic:
/// `τ_b^{−1} T_{i,b} = (d_b/(b h_b)) ∫ {Σ_j K[((x_{i+j−1}−x_{i−1})−x)/h_b] ũ_{i+j−1}}² π(x) dx`.
///
/// Residuals come from `resid` (sliced or per-block refit); the reset
/// regressors always position the kernel sums.
#[allow(clippy::too_many_arguments)]
pub fn subsample_mhm_with(
    x: &[f64],
    resid: &BlockResiduals<'_>,
    b: usize,
    m: usize,
    h_rule: BandwidthRule,
    kind: MemoryKind,
    d: f64,
    lambda: f64,
    window: WeightWindow,
    grid_points: usize,
) -> Result<SubsampleDistribution> {
    let n = x.len();
    resid.check_len(n)?;
    if b < 1 || b > n {
        return Err(Error::Usage(format!("block length {b} outside 1..={n}")));
    }
    if m < 1 || m > max_subsamples(n, b) {
        return Err(Error::Usage(format!(
            "subsample count {m} outside 1..={}",
            max_subsamples(n, b)
        )));
    }
    let h_b = h_rule.bandwidth(b)?;
    // d_b / (b h_b), the reciprocal of the block scaling τ_b
    let d_b = scaling_dn(kind, b, d, lambda)?;
    let inv_tau = d_b / (b as f64 * h_b);
    let mut reset = vec![0.0; b];
    let mut values = Vec::with_capacity(m);
    let mut skipped = 0usize;
    for i in 0..m {
        let ub = match resid.block(x, i, b) {
            Some(ub) => ub,
            None => {
                skipped += 1;
                continue;
            }
        };
        let base = if i == 0 { 0.0 } else { x[i - 1] };
        for j in 0..b {
            reset[j] = x[i + j] - base;
        }
        let t = mhm_statistic(&ub, &reset, h_b, window, grid_points)?;
        values.push(inv_tau * t);
    }
    SubsampleDistribution::from_values(values, b, h_b, skipped, m)
}

/// [`subsample_mhm_with`] over slices of a precomputed residual sequence.
#[allow(clippy::too_many_arguments)]
pub fn subsample_mhm(
    x: &[f64],
    u: &[f64],
    b: usize,
    m: usize,
    h_rule: BandwidthRule,
    kind: MemoryKind,
    d: f64,
    lambda: f64,
    window: WeightWindow,
    grid_points: usize,
) -> Result<SubsampleDistribution> {
    subsample_mhm_with(
        x,
        &BlockResiduals::Sliced(u),
        b,
        m,
        h_rule,
        kind,
        d,
        lambda,
        window,
        grid_points,
    )
}

/// Two-sided subsampling p-value for the SNU statistic: the proportion of
/// subsample values exceeding the full-sample statistic in absolute value
/// (strict inequality).
pub fn pvalue_snu(z_n: f64, dist: &SubsampleDistribution) -> f64 {
    let abs = z_n.abs();
    let count = dist.values.iter().filter(|v| abs < v.abs()).count();
    count as f64 / dist.m as f64
}

/// One-sided upper subsampling p-value for the MHM statistic: the proportion
/// of subsample values strictly exceeding the full-sample normalized
/// statistic.
pub fn pvalue_mhm(normalized: f64, dist: &SubsampleDistribution) -> f64 {
    let count = dist.values.iter().filter(|v| normalized < **v).count();
    count as f64 / dist.m as f64
}

/// De-biasing calibration for the MHM statistic.
///
/// Subsample-statistic means at the two calibration block lengths
/// `b1 = ⌊3√N⌋`, `b2 = ⌊4√N⌋` estimate the finite-sample bias at those
/// lengths; a straight line through `(log b_i, log B̂_{b_i})` extrapolated to
/// `log N` gives the full-sample bias estimate `B̂_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebiasReport {
    pub b1: usize,
    pub b2: usize,
    pub bias_b1: f64,
    pub bias_b2: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Extrapolated bias `B̂_N = exp(intercept + slope·log N)`.
    pub bias_n: f64,
    /// Full-sample normalized statistic `τ_N^{−1} T_N`.
    pub full_normalized: f64,
    /// `τ_N^{−1} T_N − B̂_N`.
    pub debiased: f64,
}

/// Run the de-biasing calibration on a series. `full_u` supplies the
/// full-sample residuals entering `τ_N^{−1}T_N`; `resid` controls the block
/// residuals. The full-sample bandwidth and all block bandwidths come from
/// `h_rule`; calibration block means use the maximal number of subsamples.
#[allow(clippy::too_many_arguments)]
pub fn debias_mhm(
    x: &[f64],
    full_u: &[f64],
    resid: &BlockResiduals<'_>,
    kind: MemoryKind,
    d: f64,
    lambda: f64,
    h_rule: BandwidthRule,
    window: WeightWindow,
    grid_points: usize,
) -> Result<DebiasReport> {
    let n = x.len();
    let sqrt_n = (n as f64).sqrt();
    let b1 = (3.0 * sqrt_n).floor() as usize;
    let b2 = (4.0 * sqrt_n).floor() as usize;
    if b2 > n || b1 < 2 {
        return Err(Error::Usage(format!(
            "series too short for de-biasing: N={n} gives b1={b1}, b2={b2}"
        )));
    }
    let h = h_rule.bandwidth(n)?;
    let t_n = mhm_statistic(full_u, x, h, window, grid_points)?;
    let full_normalized = mhm_normalize(t_n, n, h, kind, d, lambda)?;

    let mut bias = [0.0; 2];
    for (slot, &b) in bias.iter_mut().zip([b1, b2].iter()) {
        let dist = subsample_mhm_with(
            x,
            resid,
            b,
            max_subsamples(n, b),
            h_rule,
            kind,
            d,
            lambda,
            window,
            grid_points,
        )?;
        *slot = dist.mean();
    }
    if bias[0] <= 0.0 || bias[1] <= 0.0 {
        return Err(Error::Debias(format!(
            "nonpositive subsample means (B1={}, B2={}): log transform undefined",
            bias[0], bias[1]
        )));
    }
    let (lb1, lb2) = ((b1 as f64).ln(), (b2 as f64).ln());
    let slope = (bias[1].ln() - bias[0].ln()) / (lb2 - lb1);
    let intercept = bias[0].ln() - slope * lb1;
    let bias_n = (intercept + slope * (n as f64).ln()).exp();
    Ok(DebiasReport {
        b1,
        b2,
        bias_b1: bias[0],
        bias_b2: bias[1],
        slope,
        intercept,
        bias_n,
        full_normalized,
        debiased: full_normalized - bias_n,
    })
}

/// P-value of the de-biased MHM test at evaluation block length `b`: the
/// proportion of de-biased subsample values `τ_b^{−1}T_{i,b} − B̂_b`
/// strictly exceeding the de-biased full statistic.
#[allow(clippy::too_many_arguments)]
pub fn debiased_mhm_pvalue(
    x: &[f64],
    resid: &BlockResiduals<'_>,
    b: usize,
    m: Option<usize>,
    h_rule: BandwidthRule,
    kind: MemoryKind,
    d: f64,
    lambda: f64,
    window: WeightWindow,
    grid_points: usize,
    report: &DebiasReport,
) -> Result<f64> {
    let m = m.unwrap_or_else(|| max_subsamples(x.len(), b));
    let dist = subsample_mhm_with(x, resid, b, m, h_rule, kind, d, lambda, window, grid_points)?;
    let bias_b = dist.mean();
    let threshold = report.debiased + bias_b;
    Ok(dist.values().iter().filter(|v| threshold < **v).count() as f64 / dist.m as f64)
}

/// Which statistic a block scan evaluates; carries the full-sample statistic
/// so the whole curve refers to the same observed value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanStatistic {
    /// SNU scan against the full-sample `Z_N`.
    Snu { full_z: f64 },
    /// Plain (non-debiased) MHM scan against the full-sample `τ_N^{−1}T_N`.
    Mhm {
        full_normalized: f64,
        kind: MemoryKind,
        d: f64,
        lambda: f64,
        window: WeightWindow,
        grid_points: usize,
    },
}

/// P-value versus block length over `b_lo..=b_hi` (step `b_step`), using the
/// maximal number of subsamples at each block length. Per-block failures are
/// reported as gaps (`None`).
pub fn block_scan(
    x: &[f64],
    resid: &BlockResiduals<'_>,
    stat: &ScanStatistic,
    b_lo: usize,
    b_hi: usize,
    b_step: usize,
    h_rule: BandwidthRule,
) -> Result<Vec<(usize, Option<f64>)>> {
    let n = x.len();
    if b_lo < 2 || b_hi >= n || b_lo > b_hi {
        return Err(Error::Usage(format!(
            "block range {b_lo}..={b_hi} outside [2, {}]",
            n - 1
        )));
    }
    if b_step < 1 {
        return Err(Error::Usage("block step must be >= 1".into()));
    }
    let mut curve = Vec::new();
    let mut b = b_lo;
    while b <= b_hi {
        let m = max_subsamples(n, b);
        let p = match stat {
            ScanStatistic::Snu { full_z } => subsample_snu_with(x, resid, b, m, h_rule)
                .ok()
                .map(|dist| pvalue_snu(*full_z, &dist)),
            ScanStatistic::Mhm {
                full_normalized,
                kind,
                d,
                lambda,
                window,
                grid_points,
            } => subsample_mhm_with(
                x,
                resid,
                b,
                m,
                h_rule,
                *kind,
                *d,
                *lambda,
                *window,
                *grid_points,
            )
            .ok()
            .map(|dist| pvalue_mhm(*full_normalized, &dist)),
        };
        curve.push((b, p));
        b += b_step;
    }
    Ok(curve)
}

/// Minimal-volatility block selection: the block length at the center of the
/// sliding window (of `window` consecutive curve points) minimizing the
/// standard deviation of p-values; ties pick the smallest block.
pub fn minimal_volatility(curve: &[(usize, f64)], window: usize) -> Result<usize> {
    if window < 3 {
        return Err(Error::Usage("volatility window must be >= 3".into()));
    }
    if curve.len() < window {
        return Err(Error::Usage(format!(
            "curve has {} points, need at least {window}",
            curve.len()
        )));
    }
    let center_offset = (window - 1) / 2;
    let mut best: Option<(f64, usize)> = None;
    for start in 0..=curve.len() - window {
        let slice = &curve[start..start + window];
        let mean = slice.iter().map(|(_, p)| p).sum::<f64>() / window as f64;
        let var = slice
            .iter()
            .map(|(_, p)| (p - mean) * (p - mean))
            .sum::<f64>()
            / window as f64;
        let sd = var.sqrt();
        let b = curve[start + center_offset].0;
        best = match best {
            None => Some((sd, b)),
            Some((bs, bb)) => {
                if sd < bs || (sd == bs && b < bb) {
                    Some((sd, b))
                } else {
                    Some((bs, bb))
                }
            }
        };
    }
    Ok(best.expect("window fits").1)
}
