//! Monte Carlo and qualitative oracles that are too heavy for in-module
//! unit tests.

use cointest::kernel::BandwidthRule;
use cointest::models::{fit, residuals, ModelFamily};
use cointest::montecarlo::{gen_response, rep_seed, GenModel, ProcessTemplate};
use cointest::processes::{
    build_series, gen_errors, gen_innovations, gen_shocks, CoeffKind, ErrorSpec, MemoryKind,
};
use cointest::stat_tests::{portmanteau, snu_statistic};
use cointest::subsampling::{block_scan, BlockResiduals, ScanStatistic};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

#[test]
fn portmanteau_pvalues_uniform_under_white_noise() {
    // 500 replications of AR(1)-filtered white-ish noise at N = 10^4; the
    // p-values should be close to Uniform(0,1): KS distance < 0.05
    let reps = 500;
    let n = 10_000;
    let mut pvals: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(rep_seed(55, rep));
            let mut u = Vec::with_capacity(n);
            let mut prev = 0.0;
            for _ in 0..n {
                let e: f64 = StandardNormal.sample(&mut rng);
                prev = 0.25 * prev + e;
                u.push(prev);
            }
            portmanteau(&u, 1, 12).unwrap().pvalue.unwrap()
        })
        .collect();
    pvals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ks: f64 = 0.0;
    for (i, p) in pvals.iter().enumerate() {
        let ecdf_hi = (i + 1) as f64 / reps as f64;
        let ecdf_lo = i as f64 / reps as f64;
        ks = ks.max((ecdf_hi - p).abs()).max((p - ecdf_lo).abs());
    }
    assert!(ks < 0.05, "KS distance from uniform: {ks:.4}");
}

#[test]
fn portmanteau_zero_autocorrelation_gives_unit_pvalue() {
    // the AR(1) fit of [0, c, 0, ..., 0] has slope 0, so the filtered
    // residuals are one-hot and every autocorrelation vanishes
    let mut u = vec![0.0; 60];
    u[1] = 5.0;
    let outcome = portmanteau(&u, 1, 6).unwrap();
    assert_eq!(outcome.statistic, 0.0);
    assert_eq!(outcome.pvalue, Some(1.0));
}

#[test]
fn simulation_design_dimensions() {
    // one replication of the basic design: d=0.1, r=0.5, N=500
    let cfg = cointest::processes::ProcessConfig {
        kind: MemoryKind::Lm,
        d: 0.1,
        lambda: 0.0,
        r: 0.5,
        error_spec: ErrorSpec::Ar1 { psi: 0.25 },
        sigma: 0.2,
        n: 500,
        trunc: 1000,
        coeffs: CoeffKind::default(),
        seed: 1,
    };
    let sp = build_series(&cfg, |x| x).unwrap();
    assert_eq!(sp.len(), 500);
    assert_eq!(sp.u.as_ref().unwrap().len(), 500);
}

/// Average p-value-versus-block curves over 50 simulated series: under the
/// null the curve varies away from zero; under the local alternative it
/// collapses toward zero, most clearly near b = 4√N.
#[test]
fn block_scan_separates_null_from_alternative() {
    let n = 100usize;
    let series = 50u64;
    let h = (n as f64).powf(-1.0 / 3.0);
    let blocks: Vec<usize> = vec![10, 20, 30, 40];
    let tmpl = ProcessTemplate {
        kind: MemoryKind::Lm,
        d: 0.1,
        lambda: 0.0,
        r: 0.5,
        error_spec: ErrorSpec::Ar1 { psi: 0.25 },
        sigma: 0.2,
        n,
        trunc: 1000,
        coeffs: CoeffKind::default(),
    };
    let mean_curve = |alt: bool| -> Vec<f64> {
        let sums: Vec<Vec<f64>> = (0..series)
            .into_par_iter()
            .map(|rep| {
                let seed = rep_seed(if alt { 9001 } else { 9000 }, rep);
                let cfg = tmpl.instantiate(seed);
                let innov = gen_innovations(cfg.n, cfg.trunc, cfg.r, seed).unwrap();
                let shocks = gen_shocks(&cfg, &innov).unwrap();
                let u = gen_errors(&cfg, &innov).unwrap();
                let mut x = Vec::with_capacity(n);
                let mut acc = 0.0;
                for s in &shocks {
                    acc += s;
                    x.push(acc);
                }
                let model = if alt {
                    GenModel::LocalAlt { nu: 3.0 }
                } else {
                    GenModel::NullLinear
                };
                let y = gen_response(model, &x, &u, cfg.sigma, &[0.0, 1.0], h).unwrap();
                let fitted = fit(ModelFamily::Linear, &x, &y, None).unwrap();
                let uhat = residuals(&fitted, &x, &y);
                let z = snu_statistic(&uhat, &x, h).unwrap().z.unwrap();
                let resid = BlockResiduals::Refit { family: ModelFamily::Linear, y: &y };
                blocks
                    .iter()
                    .map(|&b| {
                        let curve = block_scan(
                            &x,
                            &resid,
                            &ScanStatistic::Snu { full_z: z },
                            b,
                            b,
                            1,
                            BandwidthRule::Fixed { h },
                        )
                        .unwrap();
                        curve[0].1.unwrap_or(0.0)
                    })
                    .collect()
            })
            .collect();
        let mut mean = vec![0.0; blocks.len()];
        for row in &sums {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / series as f64;
            }
        }
        mean
    };
    let null_curve = mean_curve(false);
    let alt_curve = mean_curve(true);
    // alternative: mean p-value near b = 4√N below 5%
    assert!(
        alt_curve[blocks.len() - 1] < 0.05,
        "alternative curve {alt_curve:.3?} not near zero at b=40"
    );
    // null: the curve stays well away from zero everywhere
    for (b, p) in blocks.iter().zip(&null_curve) {
        assert!(*p > 0.10, "null curve at b={b} is {p:.3}, too close to zero");
    }
    // and the two separate clearly
    for (pn, pa) in null_curve.iter().zip(&alt_curve) {
        assert!(pn - pa > 0.10, "null {null_curve:.3?} vs alt {alt_curve:.3?}");
    }
}
