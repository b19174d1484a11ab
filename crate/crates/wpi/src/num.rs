//! Small numeric kit: grids, adaptive quadrature, bracketed searches and
//! log-log regression. Everything here is deterministic.

use crate::error::{Error, Result};

/// Absolute tolerance used by the adaptive quadrature.
pub const QUAD_TOL: f64 = 1e-10;
/// Hard cap on quadrature subdivisions (2^20 intervals).
pub const QUAD_MAX_DEPTH: u32 = 20;

/// Logarithmically spaced grid of `n >= 2` points spanning `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Linearly spaced grid of `n >= 2` points spanning `[lo, hi]`.
pub fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
            + adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Returns `Err(NumericalFailure)` if the integrand evaluates to NaN, and
/// `inf` propagates as a sentinel when the integrand is unbounded.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    if fa.is_nan() || fb.is_nan() || fm.is_nan() {
        return Err(Error::NumericalFailure("NaN integrand".into()));
    }
    if fa.is_infinite() || fb.is_infinite() || fm.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let whole = simpson(a, fa, b, fb, fm);
    Ok(adaptive_step(&f, a, fa, b, fb, fm, whole, tol, QUAD_MAX_DEPTH))
}

/// First `y` in `[lo, hi]` where the nonincreasing `f` drops to `target` or
/// below, by bisection; `f(lo) > target >= f(hi)` is assumed.
pub fn bisect_nonincreasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Golden-section maximization of `f` on `[lo, hi]` (unimodal refinement
/// after a bracketing scan).
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Least-squares slope of `log y` against `log x`; pairs with
/// non-positive coordinates are skipped.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    linear_slope(&pts)
}

/// Least-squares slope of precomputed `(x, y)` pairs.
pub fn linear_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    sxy / sxx
}

/// Least-squares intercept of `y` on `x` (used for Richardson-style
/// extrapolation to `x = 0`).
pub fn linear_intercept(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        my
    } else {
        my - (sxy / sxx) * mx
    }
}

/// True if `v` is nonincreasing up to `tol` slack.
pub fn is_nonincreasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_on_polynomials() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, QUAD_TOL).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_handles_steep_integrand() {
        // int_{1e-3}^{1} 1/x dx = ln(1e3)
        let v = adaptive_simpson(|x| 1.0 / x, 1e-3, 1.0, QUAD_TOL).unwrap();
        assert!((v - (1e3f64).ln()).abs() < 1e-8);
    }

    #[test]
    fn bisect_finds_drop_point() {
        let f = |y: f64| 1.0 / y;
        let y = bisect_nonincreasing(f, 0.5, 1e-8, 1e8);
        assert!((y - 2.0).abs() < 1e-9);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        // location accuracy is limited to ~sqrt(eps) by value ties near the
        // peak; the value itself is exact
        let (x, v) = golden_max(|x| -(x - 3.0) * (x - 3.0) + 7.0, 0.0, 10.0, 80);
        assert!((x - 3.0).abs() < 1e-6);
        assert!((v - 7.0).abs() < 1e-12);
    }

    #[test]
    fn slope_of_power_law_is_exact() {
        let xs: Vec<f64> = (1..50).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.7)).collect();
        assert!((loglog_slope(&xs, &ys) + 1.7).abs() < 1e-10);
    }
}
