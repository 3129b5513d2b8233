//! Special functions and small quadrature utilities.

use crate::error::{Error, Result};

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

const MAX_ITER: usize = 500;

/// Regularized lower incomplete gamma function P(a, x) = γ(a, x)/Γ(a).
///
/// Requires `a > 0` and `x >= 0`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    let (p, _q) = gamma_pq(a, x)?;
    Ok(p)
}

/// Regularized upper incomplete gamma function Q(a, x) = Γ(a, x)/Γ(a) = 1 − P(a, x).
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    let (_p, q) = gamma_pq(a, x)?;
    Ok(q)
}

/// Compute P(a, x) and Q(a, x) together, choosing the representation that
/// avoids cancellation: series for P when `x < a + 1`, Lentz continued
/// fraction for Q otherwise.
fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if a <= 0.0 {
        return Err(Error::Domain(format!("gamma_pq requires a > 0, got {a}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("gamma_pq requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    // exp(-x + a ln x - ln Γ(a)), the prefactor shared by both expansions
    let log_pre = -x + a * x.ln() - ln_gamma(a);
    let pre = log_pre.exp();

    if x < a + 1.0 {
        let p = lower_series(a, x, pre)?;
        Ok((p, 1.0 - p))
    } else {
        let q = upper_cf(a, x, pre)?;
        Ok((1.0 - q, q))
    }
}

/// Series P(a,x) = pre · Σ_{n>=0} x^n / (a (a+1) ... (a+n)).
fn lower_series(a: f64, x: f64, pre: f64) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * f64::EPSILON {
            return Ok((pre * sum).min(1.0));
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma series failed to converge (a={a}, x={x})"
    )))
}

/// Continued fraction for Q(a,x) evaluated with the modified Lentz method.
fn upper_cf(a: f64, x: f64, pre: f64) -> Result<f64> {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            return Ok((pre * h).min(1.0));
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma continued fraction failed to converge (a={a}, x={x})"
    )))
}

/// Gaussian elimination with partial pivoting for small dense systems.
/// A pivot below `1e-10` (on equilibrated input) signals a singular system.
pub(crate) fn solve_small(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let m = b.len();
    const PIVOT_TOL: f64 = 1e-10;
    for col in 0..m {
        let mut piv = col;
        for row in col + 1..m {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if a[piv][col].abs() < PIVOT_TOL {
            return Err(Error::Rank("singular linear system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for col in (0..m).rev() {
        let mut s = b[col];
        for k in col + 1..m {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Ok(x)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// The integrand must be finite on the closed interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_q_at_zero_is_one() {
        assert_eq!(gamma_q(2.5, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn gamma_q_exponential_closed_form() {
        // Q(1, x) = e^{-x}
        for &x in &[0.1, 0.7, 1.3, 4.0, 9.0] {
            let q = gamma_q(1.0, x).unwrap();
            assert!((q - (-x).exp()).abs() < 1e-14, "x={x}: {q}");
        }
    }

    #[test]
    fn gamma_p_plus_q_is_one() {
        for &a in &[0.5, 1.0, 2.5, 8.5, 17.0] {
            for &x in &[0.2, 1.0, 3.0, 10.0, 40.0] {
                let p = gamma_p(a, x).unwrap();
                let q = gamma_q(a, x).unwrap();
                assert!((p + q - 1.0).abs() < 1e-12, "a={a} x={x}");
            }
        }
    }

    #[test]
    fn gamma_q_half_integer_closed_form() {
        // Q(1/2, x) = erfc(sqrt(x))
        for &x in &[0.25, 1.0, 2.25, 6.25] {
            let q = gamma_q(0.5, x).unwrap();
            let expect = libm::erfc(x.sqrt());
            assert!((q - expect).abs() < 1e-14, "x={x}: {q} vs {expect}");
        }
    }

    #[test]
    fn gamma_rejects_bad_domain() {
        assert!(matches!(gamma_q(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(gamma_q(1.0, -0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn simpson_polynomial_is_exact() {
        // cubic integrated exactly by Simpson
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 1.0;
        let v = adaptive_simpson(&f, 0.0, 2.0, 1e-12);
        assert!((v - (8.0 - 4.0 + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn simpson_oscillatory() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
