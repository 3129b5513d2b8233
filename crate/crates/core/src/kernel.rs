//! Gaussian kernel primitives, Nadaraya-Watson estimation, and leave-one-out
//! cross-validated bandwidth selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bandwidth rule: a fixed value, or the `n^{−1/3}` power rule evaluated at
/// whatever sample (or block) length the statistic runs on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum BandwidthRule {
    Fixed { h: f64 },
    Power,
}

impl BandwidthRule {
    /// Resolve the rule at sample length `n`.
    pub fn bandwidth(&self, n: usize) -> Result<f64> {
        let h = match self {
            BandwidthRule::Fixed { h } => *h,
            BandwidthRule::Power => (n as f64).powf(-1.0 / 3.0),
        };
        if !(h > 0.0) {
            return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
        }
        Ok(h)
    }
}

/// Standard normal density `K(x) = exp(−x²/2)/√(2π)`.
#[inline]
pub fn gaussian_kernel(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.3989422804014327;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Nadaraya-Watson estimate `Σ y_k K((x_k−x0)/h) / Σ K((x_k−x0)/h)`.
///
/// Returns a degenerate-point error when the total weight underflows to zero.
pub fn nw_estimate(x_data: &[f64], y_data: &[f64], x0: f64, h: f64) -> Result<f64> {
    check_xy(x_data, y_data, h)?;
    match nw_at(x_data, y_data, x0, h) {
        Some(v) => Ok(v),
        None => Err(Error::Degenerate(format!(
            "all kernel weights underflow to zero at x0={x0}, h={h}"
        ))),
    }
}

/// Weighted-mean core shared by the estimators; `None` marks zero total weight.
#[inline]
pub(crate) fn nw_at(x_data: &[f64], y_data: &[f64], x0: f64, h: f64) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xk, &yk) in x_data.iter().zip(y_data) {
        let w = gaussian_kernel((xk - x0) / h);
        num += yk * w;
        den += w;
    }
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

fn check_xy(x: &[f64], y: &[f64], h: f64) -> Result<()> {
    if x.is_empty() {
        return Err(Error::Usage("empty data".into()));
    }
    if x.len() != y.len() {
        return Err(Error::Length(format!(
            "x and y lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
    }
    Ok(())
}

/// Leave-one-out cross-validation score at bandwidth `h`, with the count of
/// points whose leave-one-out weights all underflowed (those terms are
/// skipped rather than aborting the scan).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LcvScore {
    /// Mean squared leave-one-out prediction error over the evaluable points.
    pub score: f64,
    /// Number of points excluded because their leave-one-out weight was zero.
    pub excluded: usize,
}

/// Least-squares leave-one-out cross-validation:
/// `LCV(h) = mean_k (y_k − f̂_{−k}(x_k))²`, where `f̂_{−k}` omits observation
/// `k` from both kernel sums.
pub fn lcv_score(x_data: &[f64], y_data: &[f64], h: f64) -> Result<LcvScore> {
    check_xy(x_data, y_data, h)?;
    let n = x_data.len();
    if n < 2 {
        return Err(Error::Usage("lcv_score requires at least 2 points".into()));
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    for k in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            if j == k {
                continue;
            }
            let w = gaussian_kernel((x_data[j] - x_data[k]) / h);
            num += y_data[j] * w;
            den += w;
        }
        if den == 0.0 {
            continue;
        }
        let e = y_data[k] - num / den;
        sum += e * e;
        used += 1;
    }
    if used == 0 {
        return Err(Error::Degenerate(format!(
            "every leave-one-out point degenerates at h={h}"
        )));
    }
    Ok(LcvScore {
        score: sum / used as f64,
        excluded: n - used,
    })
}

/// Scan a bandwidth grid and return the minimizer of [`lcv_score`] together
/// with its score. Ties pick the smallest bandwidth; grid points where every
/// leave-one-out term degenerates are skipped.
pub fn select_bandwidth(x_data: &[f64], y_data: &[f64], h_grid: &[f64]) -> Result<(f64, LcvScore)> {
    if h_grid.is_empty() {
        return Err(Error::Usage("bandwidth grid is empty".into()));
    }
    let mut best: Option<(f64, LcvScore)> = None;
    for &h in h_grid {
        let sc = match lcv_score(x_data, y_data, h) {
            Ok(sc) => sc,
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        };
        best = match best {
            None => Some((h, sc)),
            Some((bh, bs)) => {
                if sc.score < bs.score || (sc.score == bs.score && h < bh) {
                    Some((h, sc))
                } else {
                    Some((bh, bs))
                }
            }
        };
    }
    best.ok_or_else(|| Error::Degenerate("every grid point degenerated".into()))
}

/// Default selection grid: 200 log-spaced bandwidths spanning
/// `[0.01, 1] · range(x)`.
pub fn default_bandwidth_grid(x_data: &[f64]) -> Vec<f64> {
    let lo = x_data.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x_data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = (hi - lo).max(f64::MIN_POSITIVE);
    let a = (0.01 * range).ln();
    let b = range.ln();
    (0..200)
        .map(|i| (a + (b - a) * i as f64 / 199.0).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_at_zero() {
        assert!((gaussian_kernel(0.0) - 0.3989422804).abs() < 1e-9);
    }

    #[test]
    fn kernel_is_symmetric_and_peaked_at_zero() {
        assert_eq!(gaussian_kernel(1.7), gaussian_kernel(-1.7));
        for &x in &[0.3, 1.0, 2.5, 7.0] {
            assert!(gaussian_kernel(x) > 0.0);
            assert!(gaussian_kernel(x) < gaussian_kernel(0.0));
        }
    }

    #[test]
    fn kernel_integrates_to_one() {
        // fine trapezoid over [-8, 8]
        let n = 200_000;
        let (a, b) = (-8.0, 8.0);
        let step = (b - a) / n as f64;
        let mut s = 0.5 * (gaussian_kernel(a) + gaussian_kernel(b));
        for i in 1..n {
            s += gaussian_kernel(a + i as f64 * step);
        }
        let integral = s * step;
        assert!((integral - 1.0).abs() < 1e-6, "{integral}");
    }

    #[test]
    fn nw_constant_response() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y = [3.5; 4];
        for &x0 in &[-1.0, 0.7, 4.0] {
            assert!((nw_estimate(&x, &y, x0, 1.0).unwrap() - 3.5).abs() < 1e-12);
        }
    }

    #[test]
    fn nw_single_observation() {
        assert_eq!(nw_estimate(&[2.0], &[7.0], 2.5, 0.3).unwrap(), 7.0);
    }

    #[test]
    fn nw_matches_manual_weighted_mean() {
        let x = [0.0, 0.5, 1.0, 1.5, 2.0];
        let y = [1.0, 2.0, 0.5, -1.0, 3.0];
        let x0 = 0.8;
        let h = 1.0;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..5 {
            let w = gaussian_kernel((x[i] - x0) / h);
            num += y[i] * w;
            den += w;
        }
        let got = nw_estimate(&x, &y, x0, h).unwrap();
        assert!((got - num / den).abs() < 1e-15);
    }

    #[test]
    fn nw_reports_degenerate_point() {
        // x0 is ~1e5 bandwidths away from every point: all weights underflow
        let x = [0.0, 1.0];
        let y = [1.0, 2.0];
        let err = nw_estimate(&x, &y, 1.0e5, 1.0).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn nw_affine_equivariance_in_y() {
        let x = [0.1, 0.9, 1.7, 2.2, 3.0, 4.1];
        let y = [0.3, -0.4, 1.2, 0.8, 2.0, -1.1];
        let (a, b) = (2.5, -0.7);
        let ya: Vec<f64> = y.iter().map(|&v| a * v + b).collect();
        for &x0 in &[0.5, 1.9, 3.3] {
            let base = nw_estimate(&x, &y, x0, 0.8).unwrap();
            let scaled = nw_estimate(&x, &ya, x0, 0.8).unwrap();
            assert!((scaled - (a * base + b)).abs() < 1e-12);
        }
    }

    #[test]
    fn lcv_zero_for_constant_response() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [2.0; 4];
        let sc = lcv_score(&x, &y, 0.7).unwrap();
        assert!(sc.score.abs() < 1e-28);
        assert_eq!(sc.excluded, 0);
    }

    #[test]
    fn lcv_matches_manual_three_point() {
        let x = [0.0, 1.0, 2.5];
        let y = [1.0, 0.0, 2.0];
        let h = 0.9;
        let mut expect = 0.0;
        for k in 0..3 {
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..3 {
                if j == k {
                    continue;
                }
                let w = gaussian_kernel((x[j] - x[k]) / h);
                num += y[j] * w;
                den += w;
            }
            let e = y[k] - num / den;
            expect += e * e;
        }
        expect /= 3.0;
        let sc = lcv_score(&x, &y, h).unwrap();
        assert!((sc.score - expect).abs() < 1e-15);
    }

    #[test]
    fn lcv_counts_degenerate_points() {
        // far isolated point: its leave-one-out weights underflow at tiny h
        let x = [0.0, 0.01, 0.02, 1.0e6];
        let y = [1.0, 2.0, 3.0, 4.0];
        let sc = lcv_score(&x, &y, 1e-3).unwrap();
        assert_eq!(sc.excluded, 1);
    }

    #[test]
    fn lcv_score_is_nonnegative() {
        let x = [0.3, 0.9, 1.2, 2.0, 2.6];
        let y = [0.5, -1.0, 0.2, 1.4, 0.9];
        for &h in &[0.1, 0.5, 2.0] {
            assert!(lcv_score(&x, &y, h).unwrap().score >= 0.0);
        }
    }

    #[test]
    fn select_bandwidth_single_grid_point() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.1, 0.4, 0.2, 0.6];
        let (h, _) = select_bandwidth(&x, &y, &[0.33]).unwrap();
        assert_eq!(h, 0.33);
    }

    #[test]
    fn select_bandwidth_returns_grid_element() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| (2.0 * v).sin()).collect();
        let grid: Vec<f64> = (1..40).map(|i| 0.02 * i as f64).collect();
        let (h, sc) = select_bandwidth(&x, &y, &grid).unwrap();
        assert!(grid.contains(&h));
        assert!(sc.score >= 0.0);
        // the winner really is the grid minimum
        for &g in &grid {
            if let Ok(other) = lcv_score(&x, &y, g) {
                assert!(sc.score <= other.score + 1e-15);
            }
        }
    }

    #[test]
    fn select_bandwidth_rejects_empty_grid() {
        assert!(matches!(
            select_bandwidth(&[0.0, 1.0], &[0.0, 1.0], &[]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn default_grid_spans_range() {
        let x = [0.0, 10.0];
        let grid = default_bandwidth_grid(&x);
        assert_eq!(grid.len(), 200);
        assert!((grid[0] - 0.1).abs() < 1e-12);
        assert!((grid[199] - 10.0).abs() < 1e-9);
    }
}
