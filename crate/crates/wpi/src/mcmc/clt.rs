//! Central limit theorem criterion via summability of
//! `Σ n^(−3/2)·‖V_n f‖` with `V_n f = Σ_{k<n} P^k f`.

use serde::{Deserialize, Serialize};

use crate::chain::{FiniteKernel, Observable};
use crate::error::Result;
use crate::num;
use crate::rate::ConvergenceProfile;

/// Polynomial decay `γ(n) ~ n^(−a)` guarantees a CLT exactly above `a = 1`.
pub const CLT_CRITICAL_SLOPE: f64 = 1.0;
/// Estimated slopes within this margin of the threshold are inconclusive.
pub const CLT_SLOPE_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CltVerdict {
    Converges,
    Inconclusive,
    NoGuarantee,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltReport {
    /// Estimated polynomial decay exponent of the profile (`+∞`-like
    /// values indicate super-polynomial decay).
    pub slope_a: f64,
    pub verdict: CltVerdict,
    /// Partial sums `S_N = Σ_{n<=N} n^(−3/2)·‖V_n f‖` (exact or bounded).
    pub partial_sums: Vec<f64>,
    /// For `γ(n) ∈ O(n^(−b))` with `b > 1`, a CLT extends to `L₀^p(μ)`
    /// for `p > 2b/(b−1)`.
    pub p_threshold: Option<f64>,
}

/// `p > 2b/(b−1)` extends the CLT from bounded functions to `L₀^p`.
pub fn clt_p_threshold(b: f64) -> Option<f64> {
    if b > 1.0 {
        Some(2.0 * b / (b - 1.0))
    } else {
        None
    }
}

/// Verdict from a certified convergence profile: the partial sums use the
/// Minkowski bound `‖V_n f‖ <= Φ^(1/2)·Σ_{k<n} γ(k)^(1/2)`.
pub fn clt_check_profile(profile: &ConvergenceProfile, phi: f64) -> Result<CltReport> {
    let n_max = profile.n_max();
    let mut vsum = 0.0f64; // Σ_{k<n} sqrt(γ(k))
    let mut s = 0.0f64;
    let mut partial_sums = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        vsum += profile.value(n - 1).max(0.0).sqrt();
        s += (n as f64).powf(-1.5) * phi.sqrt() * vsum;
        partial_sums.push(s);
    }
    // detect super-polynomial decay: log γ close to linear in n
    let (slope_a, geometric) = decay_slope(&profile.gamma);
    let verdict = classify(slope_a, geometric);
    let p_threshold = if geometric {
        Some(2.0) // any p > 2 works for faster-than-polynomial decay
    } else {
        clt_p_threshold(slope_a)
    };
    Ok(CltReport { slope_a, verdict, partial_sums, p_threshold })
}

/// Exact verdict on a finite chain: `V_n f` by iterated application, the
/// decay exponent from `‖Pⁿf‖²`.
pub fn clt_check_exact(
    kernel: &FiniteKernel,
    f: &Observable,
    n_max: usize,
) -> Result<CltReport> {
    let mut g = f.centered();
    let mut vf = vec![0.0; kernel.n()]; // V_n f accumulates P^k f
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut s = 0.0f64;
    let mut decay = Vec::with_capacity(n_max + 1);
    decay.push(kernel.norm_sq(&g));
    for n in 1..=n_max {
        for (v, gi) in vf.iter_mut().zip(&g) {
            *v += gi;
        }
        s += (n as f64).powf(-1.5) * kernel.norm_sq(&vf).sqrt();
        partial_sums.push(s);
        g = kernel.apply(&g);
        // re-center to keep rounding from growing a constant component
        let mean: f64 = g.iter().zip(kernel.mu()).map(|(v, m)| v * m).sum();
        for v in g.iter_mut() {
            *v -= mean;
        }
        decay.push(kernel.norm_sq(&g));
    }
    let (slope_a, geometric) = decay_slope(&decay);
    let verdict = classify(slope_a, geometric);
    let p_threshold = if geometric { Some(2.0) } else { clt_p_threshold(slope_a) };
    Ok(CltReport { slope_a, verdict, partial_sums, p_threshold })
}

/// Fitted polynomial exponent of a decay sequence over its upper half,
/// plus a flag for super-polynomial (at least geometric) decay.
fn decay_slope(gamma: &[f64]) -> (f64, bool) {
    let n_max = gamma.len() - 1;
    let lo = (n_max / 2).max(1);
    let pts_poly: Vec<(f64, f64)> = (lo..=n_max)
        .filter(|&n| gamma[n] > 1e-290)
        .map(|n| ((n as f64).ln(), gamma[n].ln()))
        .collect();
    if pts_poly.len() < 3 {
        // decayed below floor: certainly summable
        return (f64::INFINITY, true);
    }
    let slope = -num::linear_slope(&pts_poly);
    // under geometric decay the log-log slope keeps growing with n; the
    // giveaway is linearity of log γ in n
    let pts_geo: Vec<(f64, f64)> = (lo..=n_max)
        .filter(|&n| gamma[n] > 1e-290)
        .map(|n| (n as f64, gamma[n].ln()))
        .collect();
    let geo_slope = num::linear_slope(&pts_geo);
    let mut max_resid = 0.0f64;
    let intercept = num::linear_intercept(&pts_geo);
    for (x, y) in &pts_geo {
        max_resid = max_resid.max((y - (intercept + geo_slope * x)).abs());
    }
    let geometric = geo_slope < -1e-6 && max_resid < 1e-3 * geo_slope.abs() * (n_max as f64);
    (slope, geometric)
}

fn classify(slope_a: f64, geometric: bool) -> CltVerdict {
    if geometric {
        return CltVerdict::Converges;
    }
    if (slope_a - CLT_CRITICAL_SLOPE).abs() <= CLT_SLOPE_MARGIN {
        CltVerdict::Inconclusive
    } else if slope_a > CLT_CRITICAL_SLOPE {
        CltVerdict::Converges
    } else {
        CltVerdict::NoGuarantee
    }
}
