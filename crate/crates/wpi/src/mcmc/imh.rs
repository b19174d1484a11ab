//! Independence sampler on geometric target/proposal pairs: closed-form
//! spectrum, exact truncated build, and the asymptotic-variance
//! summability diagnostic.

use serde::{Deserialize, Serialize};

use crate::chain::{FiniteKernel, Observable};
use crate::error::{Error, Result};

/// Independence sampler with target `π(x) = (1−a)aˣ` and proposal
/// `q(x) = (1−b)bˣ` on `{0, 1, ...}`, truncated at `truncation` states
/// (target and proposal renormalized on the truncated range).
///
/// `0 < b < a < 1` is the heavy-proposal regime with no spectral gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImhGeometric {
    pub a: f64,
    pub b: f64,
    pub truncation: usize,
}

impl ImhGeometric {
    pub fn new(a: f64, b: f64, truncation: usize) -> Result<Self> {
        if !(0.0 < b && b < a && a < 1.0) {
            return Err(Error::DomainError(format!(
                "need 0 < b < a < 1, got a={a}, b={b}"
            )));
        }
        if truncation < 2 {
            return Err(Error::DomainError("truncation must be at least 2".into()));
        }
        Ok(ImhGeometric { a, b, truncation })
    }

    /// Renormalized target on `0..=truncation`.
    pub fn pi(&self) -> Vec<f64> {
        geometric_renorm(self.a, self.truncation)
    }

    /// Renormalized proposal on `0..=truncation`.
    pub fn q(&self) -> Vec<f64> {
        geometric_renorm(self.b, self.truncation)
    }
}

fn geometric_renorm(r: f64, trunc: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=trunc).map(|x| (1.0 - r) * r.powi(x as i32)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
    v
}

/// Closed-form spectrum atoms
/// `Λ_m = 1 − (1−b)/(1−a)·(b/a)^m + (a−b)/(1−a)·b^m`, increasing to 1.
pub fn imh_spectrum(a: f64, b: f64, m_max: usize) -> Result<Vec<f64>> {
    if !(0.0 < b && b < a && a < 1.0) {
        return Err(Error::DomainError(format!("need 0 < b < a < 1, got a={a}, b={b}")));
    }
    Ok((0..=m_max)
        .map(|m| {
            let m = m as i32;
            1.0 - (1.0 - b) / (1.0 - a) * (b / a).powi(m) + (a - b) / (1.0 - a) * b.powi(m)
        })
        .collect())
}

/// Exact truncated transition matrix: propose from the truncated `q`,
/// accept with probability `1 ∧ w(y)/w(x)` where `w = π/q`.
pub fn imh_build(chain: &ImhGeometric) -> Result<FiniteKernel> {
    let n = chain.truncation + 1;
    let pi = chain.pi();
    let q = chain.q();
    // importance ratios up to a constant; only ratios enter the chain
    let w: Vec<f64> = (0..n).map(|x| pi[x] / q[x]).collect();
    let mut rows = vec![vec![0.0; n]; n];
    for x in 0..n {
        let mut leave = 0.0;
        for y in 0..n {
            if y == x {
                continue;
            }
            let acc = 1.0f64.min(w[y] / w[x]);
            rows[x][y] = q[y] * acc;
            leave += rows[x][y];
        }
        rows[x][x] = 1.0 - leave;
    }
    FiniteKernel::with_stationary(rows, pi)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImhValidation {
    /// `|λ_sorted[i] − Λ_{i+1}|` for the `m_max` smallest eigenvalues.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Compare the truncated matrix spectrum against the closed-form atoms.
///
/// A truncation with `N+1` states realizes exactly the unit eigenvalue
/// together with the rejection values at states `1..=N`, which converge to
/// `Λ_1, Λ_2, ...`; the atom `Λ_0 = 0` (the never-rejecting bottom state)
/// is a spectral value of the infinite chain only. The `m_max` smallest
/// matrix eigenvalues are therefore matched against `Λ_1..Λ_m_max`.
pub fn imh_spectrum_validate(
    chain: &ImhGeometric,
    m_max: usize,
    tol: f64,
) -> Result<ImhValidation> {
    if chain.truncation < m_max + 10 {
        return Err(Error::TruncationTooSmall(format!(
            "truncation {} leaves no margin over m_max {m_max}",
            chain.truncation
        )));
    }
    let kernel = imh_build(chain)?;
    let measure_basis = kernel.spectral_measure(&vec![1.0; kernel.n()])?;
    let mut eigs = measure_basis.eigenvalues;
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let lam = imh_spectrum(chain.a, chain.b, m_max)?;
    let residuals: Vec<f64> = (0..m_max).map(|i| (eigs[i] - lam[i + 1]).abs()).collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    if max_residual > tol {
        return Err(Error::TruncationTooSmall(format!(
            "spectrum residual {max_residual:.3e} exceeds {tol:.3e}"
        )));
    }
    Ok(ImhValidation { residuals, max_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymVarVerdict {
    Summable,
    NotSummable,
    Borderline,
}

/// Finite-truncation diagnostic for `Σ (1−Λ_m)⁻¹ ν_f(Λ_m) < ∞`: the sum is
/// finite exactly when the masses decay strictly faster than `(b/a)^m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImhAsymVarDiag {
    pub partial_sums: Vec<f64>,
    /// `ν_f` mass attached to each `Λ_m` atom.
    pub masses: Vec<f64>,
    /// Fitted decay rate of `log ν_f(Λ_m)` per unit `m`.
    pub mass_log_rate: f64,
    /// `log(b/a)`, the critical rate.
    pub critical_log_rate: f64,
    pub verdict: AsymVarVerdict,
}

pub fn imh_asymvar_criterion(chain: &ImhGeometric, f: &Observable) -> Result<ImhAsymVarDiag> {
    let kernel = imh_build(chain)?;
    let centered = f.centered();
    let measure = kernel.spectral_measure(&centered)?;
    // match eigenvalues to the closed-form atoms on the reliable range
    let m_max = (chain.truncation / 4).clamp(5, 60);
    let lam = imh_spectrum(chain.a, chain.b, m_max)?;
    let mut masses = vec![0.0f64; m_max + 1];
    for (l, mass) in measure.eigenvalues.iter().zip(&measure.masses) {
        if *l >= 1.0 - 1e-12 {
            continue;
        }
        let mut best = 0usize;
        let mut dist = f64::INFINITY;
        for (m, lm) in lam.iter().enumerate() {
            let d = (l - lm).abs();
            if d < dist {
                dist = d;
                best = m;
            }
        }
        masses[best] += mass;
    }
    let mut partial_sums = Vec::with_capacity(m_max + 1);
    let mut acc = 0.0;
    for m in 0..=m_max {
        if lam[m] < 1.0 {
            acc += masses[m] / (1.0 - lam[m]);
        }
        partial_sums.push(acc);
    }
    // decay rate of positive masses over the stable middle range
    let pts: Vec<(f64, f64)> = (1..=m_max)
        .filter(|&m| masses[m] > 1e-250)
        .map(|m| (m as f64, masses[m].ln()))
        .collect();
    let mass_log_rate = crate::num::linear_slope(&pts);
    let critical = (chain.b / chain.a).ln();
    let margin = 0.05 * critical.abs();
    // a fit over too few atoms means only finitely many carry mass
    let verdict = if !mass_log_rate.is_finite()
        || pts.len() < 3
        || mass_log_rate < critical - margin
    {
        AsymVarVerdict::Summable
    } else if mass_log_rate > critical + margin {
        AsymVarVerdict::NotSummable
    } else {
        AsymVarVerdict::Borderline
    };
    Ok(ImhAsymVarDiag {
        partial_sums,
        masses,
        mass_log_rate,
        critical_log_rate: critical,
        verdict,
    })
}
