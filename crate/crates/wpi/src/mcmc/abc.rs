//! Pseudo-marginal ABC chain on a geometric prior with geometric synthetic
//! likelihood, built exactly on the finite support of the binomial
//! likelihood estimator.

use serde::{Deserialize, Serialize};

use crate::bounds::KappaEnvelope;
use crate::chain::FiniteKernel;
use crate::error::{Error, Result};

/// ABC setup: prior `ν(x) = (1−q)q^(x−1)` on `{1, 2, ...}`, approximate
/// likelihood `ℓ(x) = a^(x−1)`, estimated by an average of `n_particles`
/// Bernoulli draws. The joint chain lives on pairs `(x, w)` where `w`
/// ranges over the estimator support `{k/(N·ℓ(x))}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbcChain {
    pub a: f64,
    pub q: f64,
    pub n_particles: usize,
    pub x_max: usize,
}

impl AbcChain {
    pub fn new(a: f64, q: f64, n_particles: usize, x_max: usize) -> Result<Self> {
        if !(0.0 < a && a < 1.0 && 0.0 < q && q < 1.0) {
            return Err(Error::DomainError(format!("need a, q in (0,1), got a={a}, q={q}")));
        }
        if n_particles == 0 || x_max < 3 {
            return Err(Error::DomainError("need N >= 1 and x_max >= 3".into()));
        }
        Ok(AbcChain { a, q, n_particles, x_max })
    }

    /// ABC posterior `π(x) ∝ ν(x)ℓ(x) = (1−aq)(aq)^(x−1)`, renormalized on
    /// the truncation.
    pub fn pi_abc(&self) -> Vec<f64> {
        let aq = self.a * self.q;
        let mut v: Vec<f64> = (1..=self.x_max)
            .map(|x| (1.0 - aq) * aq.powi(x as i32 - 1))
            .collect();
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|p| *p /= total);
        v
    }

    fn likelihood(&self, x: usize) -> f64 {
        self.a.powi(x as i32 - 1)
    }
}

fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; n + 1];
    if p >= 1.0 {
        pmf[n] = 1.0;
        return pmf;
    }
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    for (k, e) in pmf.iter_mut().enumerate() {
        let mut log_c = 0.0;
        for i in 0..k {
            log_c += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        *e = (log_c + (k as f64) * p.ln() + ((n - k) as f64) * (1.0 - p).ln()).exp();
    }
    pmf
}

/// Exact joint kernel over the positive-mass support: states are pairs
/// `(x, k)` with `k >= 1` successes in the estimator (a zero estimate is
/// never accepted, so those states carry no stationary mass). Proposals
/// move `x` by ±1 with probability 1/2 each and redraw the estimator; the
/// move is accepted with probability `1 ∧ (aq)^(y−x)·u/w`.
pub fn abc_build(chain: &AbcChain) -> Result<(FiniteKernel, Vec<(usize, usize)>)> {
    let n_particles = chain.n_particles;
    let mut states: Vec<(usize, usize)> = Vec::new();
    for x in 1..=chain.x_max {
        for k in 1..=n_particles {
            states.push((x, k));
        }
    }
    let idx = |x: usize, k: usize| -> usize { (x - 1) * n_particles + (k - 1) };
    let m = states.len();
    let aq = chain.a * chain.q;

    // pseudo-marginal target: pi_tilde(x,k) ∝ pi(x)·w·Binom(k; N, ℓ(x))
    // with w = k/(N·ℓ(x))
    let mut mu = vec![0.0f64; m];
    let pmfs: Vec<Vec<f64>> = (0..=chain.x_max)
        .map(|x| {
            if x == 0 {
                Vec::new()
            } else {
                binomial_pmf(n_particles, chain.likelihood(x))
            }
        })
        .collect();
    for (i, &(x, k)) in states.iter().enumerate() {
        let w = k as f64 / (n_particles as f64 * chain.likelihood(x));
        mu[i] = aq.powi(x as i32 - 1) * w * pmfs[x][k];
    }
    let total: f64 = mu.iter().sum();
    mu.iter_mut().for_each(|p| *p /= total);

    let mut rows = vec![vec![0.0; m]; m];
    for (i, &(x, k)) in states.iter().enumerate() {
        let w = k as f64 / (n_particles as f64 * chain.likelihood(x));
        let mut stay = 1.0f64;
        for y in [x.wrapping_sub(1), x + 1] {
            if y < 1 || y > chain.x_max {
                continue; // proposals outside the support are rejected
            }
            let ratio_pi = aq.powi(y as i32 - 1) / aq.powi(x as i32 - 1);
            for kp in 1..=n_particles {
                let u = kp as f64 / (n_particles as f64 * chain.likelihood(y));
                let acc = 1.0f64.min(ratio_pi * u / w);
                let p = 0.5 * pmfs[y][kp] * acc;
                rows[i][idx(y, kp)] += p;
                stay -= p;
            }
        }
        rows[i][i] += stay;
    }
    let kernel = FiniteKernel::with_stationary(rows, mu)?;
    Ok((kernel, states))
}

/// Closed-form floor data for the pseudo-marginal ABC chain.
#[derive(Debug, Clone)]
pub struct AbcFloor {
    /// `β*(s) ∈ Ω(s^(−exponent))` with `exponent = log(aq)/log(a)`.
    pub beta_star_exponent: f64,
    /// Upper envelope `κ(u) <= N·a^(−2)·(2u)^(log a/log aq)`.
    pub kappa_envelope: KappaEnvelope,
}

pub fn abc_beta_floor(chain: &AbcChain) -> AbcFloor {
    let theta = chain.a.ln() / (chain.a * chain.q).ln();
    let coef = chain.n_particles as f64 * chain.a.powi(-2) * 2f64.powf(theta);
    AbcFloor {
        beta_star_exponent: (chain.a * chain.q).ln() / chain.a.ln(),
        kappa_envelope: KappaEnvelope::Power { coef, theta },
    }
}
