//! Random-walk Metropolis with Gaussian proposals scaled by `d^(−1/2)`:
//! closed-form conductance and spectral-gap bounds, their Monte Carlo
//! counterparts, the bundled arithmetic lemmas, and the heavy-tail floor.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::bounds::KappaEnvelope;
use crate::error::{Error, Result};
use crate::num;

use super::rng::{normal_vec, stream_rng};

/// Largest proposal multiplier covered by the general strongly-convex
/// conductance bound.
pub const RWM_VARSIGMA_MAX: f64 = 0.073;
/// `κ(0) >= RWM_KAPPA_COEF·ς·sqrt(m/(L·d))` for `ς <= RWM_VARSIGMA_MAX`;
/// the constant folds `ε = 1/32`, `δ = σ/16` through the isoperimetric
/// prefactor `(ε/4)·(log2/4)·δ·√m`.
pub const RWM_KAPPA_COEF: f64 = 8.46e-5;
/// `Gap_R >= RWM_GAP_COEF·ς²·m/(L·d)`, i.e. the Cheeger square of the
/// conductance constant.
pub const RWM_GAP_COEF: f64 = 8.94e-10;
/// Gaussian-target constant: `κ(0) >= GAUSS_KAPPA_COEF·e^{−ς²[…]}·ς/√d`,
/// folding `(1/4)(1−1/e)²·log2/32`.
pub const GAUSS_KAPPA_COEF: f64 = 0.00216;
/// Cheeger square of [`GAUSS_KAPPA_COEF`].
pub const GAUSS_GAP_COEF: f64 = 5.83e-7;

/// Named target potentials with exact samplers.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// `U(x) = |x|²/(2σ₀²)`.
    Gaussian,
    /// Gaussian prior plus a small fixed logistic-regression likelihood;
    /// sampled exactly by rejection from the conjugate Gaussian part.
    LogisticDemo,
}

/// Random-walk Metropolis specification: proposal increments are
/// `N(0, σ_d² Id)` with `σ_d = ς·σ₀·d^(−1/2)` for the Gaussian regime and
/// `σ_d = (ς/√L)·d^(−1/2)` for the general convex regime.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RwmSpec {
    pub d: usize,
    pub sigma0: f64,
    pub varsigma: f64,
    /// Strong-convexity constant (Gaussian target: `1/σ₀²`).
    pub m: f64,
    /// Smoothness constant (Gaussian target: `1/σ₀²`).
    pub l: f64,
    pub potential: Potential,
}

impl RwmSpec {
    pub fn gaussian(d: usize, sigma0: f64, varsigma: f64) -> Self {
        let prec = 1.0 / (sigma0 * sigma0);
        RwmSpec { d, sigma0, varsigma, m: prec, l: prec, potential: Potential::Gaussian }
    }

    pub fn logistic_demo(d: usize, sigma0: f64, varsigma: f64) -> Self {
        let prec = 1.0 / (sigma0 * sigma0);
        // L-smoothness grows with the likelihood curvature bound 1/4·|a|²
        let covs = logistic_covariates(d);
        let max_norm_sq = covs
            .iter()
            .map(|(a, _)| a.iter().map(|v| v * v).sum::<f64>())
            .fold(0.0, f64::max);
        RwmSpec {
            d,
            sigma0,
            varsigma,
            m: prec,
            l: prec + 0.25 * max_norm_sq,
            potential: Potential::LogisticDemo,
        }
    }

    /// Per-coordinate proposal standard deviation.
    pub fn sigma_d(&self) -> f64 {
        self.varsigma * self.sigma0 / (self.d as f64).sqrt()
    }

    pub fn potential_value(&self, x: &[f64]) -> f64 {
        let quad = x.iter().map(|v| v * v).sum::<f64>() / (2.0 * self.sigma0 * self.sigma0);
        match &self.potential {
            Potential::Gaussian => quad,
            Potential::LogisticDemo => {
                let mut acc = quad;
                for (a, y) in logistic_covariates(self.d) {
                    let t: f64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
                    acc += (1.0 + (-t).exp()).ln() - (y as f64) * t;
                }
                acc
            }
        }
    }

    /// Exact draw from the target.
    fn sample_target(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
        match &self.potential {
            Potential::Gaussian => normal_vec(rng, self.d)
                .into_iter()
                .map(|z| self.sigma0 * z)
                .collect(),
            Potential::LogisticDemo => {
                // π(x) ∝ N(x; σ₀²·Σyᵢaᵢ, σ₀²Id) · Π sigmoid(<aᵢ,x>):
                // rejection with acceptance factor at most one
                let covs = logistic_covariates(self.d);
                let mut mean = vec![0.0; self.d];
                for (a, y) in &covs {
                    for (mi, ai) in mean.iter_mut().zip(a) {
                        *mi += (*y as f64) * ai * self.sigma0 * self.sigma0;
                    }
                }
                loop {
                    let z = normal_vec(rng, self.d);
                    let x: Vec<f64> = z
                        .iter()
                        .zip(&mean)
                        .map(|(zi, mi)| mi + self.sigma0 * zi)
                        .collect();
                    let mut log_acc = 0.0;
                    for (a, _) in &covs {
                        let t: f64 = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
                        log_acc += -(1.0 + (-t).exp()).ln();
                    }
                    let u: f64 = rand::Rng::random(rng);
                    if u.ln() < log_acc {
                        return x;
                    }
                }
            }
        }
    }
}

/// Small deterministic covariate set for the logistic demo.
fn logistic_covariates(d: usize) -> Vec<(Vec<f64>, u8)> {
    let scale = 1.0 / (d as f64).sqrt();
    (0..4)
        .map(|i| {
            let a: Vec<f64> = (0..d)
                .map(|j| if (i + j) % 2 == 0 { scale } else { -scale })
                .collect();
            (a, (i % 2) as u8)
        })
        .collect()
}

/// Measurable sets for the conductance estimators.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescriptor {
    /// `{x : x₁ >= 0}`.
    HalfSpace,
    /// `{x : |x| <= radius}`.
    Ball { radius: f64 },
    Empty,
}

impl SetDescriptor {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            SetDescriptor::HalfSpace => x[0] >= 0.0,
            SetDescriptor::Ball { radius } => {
                x.iter().map(|v| v * v).sum::<f64>() <= radius * radius
            }
            SetDescriptor::Empty => false,
        }
    }
}

/// One Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Paired estimates of `μ⊗P(A×A^∁)` and `μ⊗μ(A×A^∁)` with the implied
/// conductance ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McConductance {
    pub flow: Estimate,
    pub cross: Estimate,
    pub ratio: f64,
    /// Delta-method standard error for the ratio.
    pub ratio_stderr: f64,
}

/// Unbiased estimators with antithetic pairing on the proposal noise and
/// the accept uniform (flow), and exchange pairing on the independent copy
/// (cross mass). Accumulation is chunked in fixed index order, so the
/// result is a deterministic function of `(spec, set, samples, seed)`
/// alone, independent of the worker count.
pub fn rwm_conductance_mc(
    spec: &RwmSpec,
    set: SetDescriptor,
    samples: usize,
    seed: u64,
    parallelism: usize,
) -> McConductance {
    const CHUNK: usize = 8192;
    let sigma_d = spec.sigma_d();
    let n_chunks = samples.div_ceil(CHUNK);

    let run_chunk = |c: usize| -> [f64; 4] {
        let lo = c * CHUNK;
        let hi = ((c + 1) * CHUNK).min(samples);
        let mut acc = [0.0f64; 4]; // flow sum, flow sumsq, cross sum, cross sumsq
        for i in lo..hi {
            let mut rng = stream_rng(seed, i as u64, 0xf10e);
            let x = spec.sample_target(&mut rng);
            let y = spec.sample_target(&mut rng);
            let z = normal_vec(&mut rng, spec.d);
            let u: f64 = rand::Rng::random(&mut rng);
            let ux = spec.potential_value(&x);
            let mut flow = 0.0;
            if set.contains(&x) {
                for (sgn, uu) in [(1.0, u), (-1.0, 1.0 - u)] {
                    let w: Vec<f64> =
                        x.iter().zip(&z).map(|(xi, zi)| xi + sgn * sigma_d * zi).collect();
                    let log_r = ux - spec.potential_value(&w);
                    let next_in_a = if uu.ln() < log_r { set.contains(&w) } else { true };
                    if !next_in_a {
                        flow += 0.5;
                    }
                }
            }
            let cross = 0.5
                * ((set.contains(&x) && !set.contains(&y)) as u8 as f64
                    + (set.contains(&y) && !set.contains(&x)) as u8 as f64);
            acc[0] += flow;
            acc[1] += flow * flow;
            acc[2] += cross;
            acc[3] += cross * cross;
        }
        acc
    };

    let width = parallelism.clamp(1, 64);
    let mut totals = [0.0f64; 4];
    if width == 1 || n_chunks <= 1 {
        for c in 0..n_chunks {
            let a = run_chunk(c);
            for (t, v) in totals.iter_mut().zip(a) {
                *t += v;
            }
        }
    } else {
        let chunk_results: Vec<[f64; 4]> = std::thread::scope(|scope| {
            let per = n_chunks.div_ceil(width);
            let handles: Vec<_> = (0..width)
                .map(|w| {
                    let run = &run_chunk;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        for c in (w * per)..((w + 1) * per).min(n_chunks) {
                            out.push((c, run(c)));
                        }
                        out
                    })
                })
                .collect();
            let mut all: Vec<(usize, [f64; 4])> = Vec::with_capacity(n_chunks);
            for h in handles {
                all.extend(h.join().expect("mc worker panicked"));
            }
            all.sort_by_key(|(c, _)| *c);
            all.into_iter().map(|(_, a)| a).collect()
        });
        // fixed summation order over chunks
        for a in chunk_results {
            for (t, v) in totals.iter_mut().zip(a) {
                *t += v;
            }
        }
    }

    let n = samples as f64;
    let mk = |sum: f64, sumsq: f64| -> Estimate {
        let mean = sum / n;
        let var = (sumsq / n - mean * mean).max(0.0);
        Estimate { value: mean, stderr: (var / n).sqrt(), n_samples: samples, seed }
    };
    let flow = mk(totals[0], totals[1]);
    let cross = mk(totals[2], totals[3]);
    let ratio = if cross.value > 0.0 { flow.value / cross.value } else { 0.0 };
    let ratio_stderr = if cross.value > 0.0 && flow.value > 0.0 {
        ratio
            * ((flow.stderr / flow.value).powi(2) + (cross.stderr / cross.value).powi(2)).sqrt()
    } else if cross.value > 0.0 {
        flow.stderr / cross.value
    } else {
        0.0
    };
    McConductance { flow, cross, ratio, ratio_stderr }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RwmRegime {
    /// `m`-strongly convex, `L`-smooth spherically symmetric potentials
    /// with `σ = (ς/√L)·d^(−1/2)` and `ς <= 0.073`.
    GeneralConvex,
    /// Exactly Gaussian targets, any `ς > 0`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GapBounds {
    pub conductance_lower: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
}

/// Closed-form conductance and right-spectral-gap bounds.
///
/// The upper bound is the test-function bound `Gap <= σ_d²/(2σ₀²)`, which
/// equals `ς²/(2d)` under both scalings (using `var(X₁) >= 1/L` for the
/// convex regime).
pub fn rwm_gap_bounds(spec: &RwmSpec, regime: RwmRegime) -> Result<GapBounds> {
    let d = spec.d as f64;
    let vs = spec.varsigma;
    if !vs.is_finite() || vs <= 0.0 {
        return Err(Error::DomainError("varsigma must be positive".into()));
    }
    let gap_upper = vs * vs / (2.0 * d);
    let bounds = match regime {
        RwmRegime::GeneralConvex => {
            if vs > RWM_VARSIGMA_MAX {
                return Err(Error::RegimeViolation(format!(
                    "varsigma {vs} exceeds {RWM_VARSIGMA_MAX} for the convex regime"
                )));
            }
            if !(spec.m > 0.0 && spec.l >= spec.m) {
                return Err(Error::DomainError("need 0 < m <= L".into()));
            }
            let ratio = spec.m / spec.l;
            GapBounds {
                conductance_lower: RWM_KAPPA_COEF * vs * (ratio / d).sqrt(),
                gap_lower: RWM_GAP_COEF * vs * vs * ratio / d,
                gap_upper,
            }
        }
        RwmRegime::Gaussian => {
            let dim_term = vs * vs * (1.0 + 2.0 / d.sqrt() + 2.0 / d);
            GapBounds {
                conductance_lower: GAUSS_KAPPA_COEF * (-dim_term).exp() * vs / d.sqrt(),
                gap_lower: GAUSS_GAP_COEF * (-2.0 * dim_term).exp() * vs * vs / d,
                gap_upper,
            }
        }
    };
    debug_assert!(bounds.gap_lower <= bounds.gap_upper);
    Ok(bounds)
}

/// Large-`d` limit of `κ_d(0)·√d` for a Gaussian target:
/// `GAUSS_KAPPA_COEF·e^(−ς²)·ς`, maximized at `ς² = 1/2` where it equals
/// `0.000926...`.
pub fn gaussian_kappa_limit(varsigma: f64) -> f64 {
    GAUSS_KAPPA_COEF * (-varsigma * varsigma).exp() * varsigma
}

/// Proposal continuity: for `|x−y| <= ε·d^(−1/2)` the proposals satisfy
/// `‖Q_x − Q_y‖_TV <= ε/(2σ)`; the exact value is
/// `erf(ε/(2√2·σ))` (a one-dimensional shift of `ε·d^(−1/2)` against
/// standard deviation `σ·d^(−1/2)`).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PinskerReport {
    pub bound: f64,
    pub exact_tv: f64,
    pub ok: bool,
}

pub fn pinsker_check(eps: f64, sigma: f64) -> PinskerReport {
    let bound = eps / (2.0 * sigma);
    let exact_tv = erf(eps / (2.0 * std::f64::consts::SQRT_2 * sigma));
    PinskerReport { bound, exact_tv, ok: exact_tv <= bound + 1e-12 }
}

/// Chi-square tail bounds `P(W >= d + 2√(du) + 2u) <= e^(−u)` and
/// `P(W <= d − 2√(du)) <= e^(−u)`, checked against simulation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Chi2Report {
    pub upper_threshold: f64,
    pub lower_threshold: f64,
    pub bound: f64,
    pub mc_upper: Estimate,
    pub mc_lower: Estimate,
    pub ok: bool,
}

pub fn chi2_tail_check(d: usize, u: f64, samples: usize, seed: u64) -> Chi2Report {
    let df = d as f64;
    let upper_threshold = df + 2.0 * (df * u).sqrt() + 2.0 * u;
    let lower_threshold = df - 2.0 * (df * u).sqrt();
    let bound = (-u).exp();
    let mut hi = 0.0f64;
    let mut lo = 0.0f64;
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64, 0xc417);
        let w: f64 = normal_vec(&mut rng, d).iter().map(|z| z * z).sum();
        if w >= upper_threshold {
            hi += 1.0;
        }
        if w <= lower_threshold {
            lo += 1.0;
        }
    }
    let n = samples as f64;
    let mk = |count: f64| {
        let p = count / n;
        Estimate { value: p, stderr: (p * (1.0 - p) / n).sqrt(), n_samples: samples, seed }
    };
    let mc_upper = mk(hi);
    let mc_lower = mk(lo);
    let ok = mc_upper.value <= bound + 3.0 * mc_upper.stderr
        && mc_lower.value <= bound + 3.0 * mc_lower.stderr;
    Chi2Report { upper_threshold, lower_threshold, bound, mc_upper, mc_lower, ok }
}

/// Uniform acceptance lower bound for Gaussian targets:
/// `P(X′ = W) >= e^{−ς²/2·[1+2d^(−1/2)+2d^(−1)]}·(1/2)(1−e^(−1))` at every
/// starting point, checked by simulation at a target draw.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussAcceptReport {
    pub bound: f64,
    pub mc_accept: Estimate,
    pub ok: bool,
}

pub fn gauss_accept_check(
    varsigma: f64,
    d: usize,
    samples: usize,
    seed: u64,
) -> GaussAcceptReport {
    let spec = RwmSpec::gaussian(d, 1.0, varsigma);
    let dd = d as f64;
    let bound = (-(varsigma * varsigma) / 2.0 * (1.0 + 2.0 / dd.sqrt() + 2.0 / dd)).exp()
        * 0.5
        * (1.0 - (-1.0f64).exp());
    let sigma_d = spec.sigma_d();
    // representative starting point from the target itself
    let x = spec.sample_target(&mut stream_rng(seed, u64::MAX, 0xacce));
    let ux = spec.potential_value(&x);
    let mut acc_sum = 0.0f64;
    let mut acc_sumsq = 0.0f64;
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64, 0xacce);
        let z = normal_vec(&mut rng, d);
        let w: Vec<f64> = x.iter().zip(&z).map(|(xi, zi)| xi + sigma_d * zi).collect();
        let acc = 1.0f64.min((ux - spec.potential_value(&w)).exp());
        acc_sum += acc;
        acc_sumsq += acc * acc;
    }
    let n = samples as f64;
    let mean = acc_sum / n;
    let var = (acc_sumsq / n - mean * mean).max(0.0);
    let mc_accept = Estimate { value: mean, stderr: (var / n).sqrt(), n_samples: samples, seed };
    GaussAcceptReport { bound, mc_accept, ok: bound <= mean + 3.0 * mc_accept.stderr }
}

/// Acceptance ceiling near the origin for proposal scaling `d^(−β)`:
/// for `|x| <= δ_d` the acceptance probability is at most
/// `e^(−d/16) + e^(−ς²·d^(1−2β)/8)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcceptCeilingReport {
    pub ceiling: f64,
    pub delta_d: f64,
    pub mc_accept: Estimate,
    pub ok: bool,
}

pub fn accept_ceiling_check(
    varsigma: f64,
    beta_exp: f64,
    d: usize,
    samples: usize,
    seed: u64,
) -> AcceptCeilingReport {
    let dd = d as f64;
    let sigma0 = 1.0;
    let sigma_d = varsigma * sigma0 * dd.powf(-beta_exp);
    // δ_d = σ_d·√d/(4√2), capped at the target median radius
    let median_radius = sigma0 * dd.sqrt();
    let delta_d = (sigma_d * dd.sqrt() / (4.0 * std::f64::consts::SQRT_2)).min(median_radius);
    let ceiling = (-dd / 16.0).exp()
        + (-(varsigma * varsigma) * dd.powf(1.0 - 2.0 * beta_exp) / 8.0).exp();
    // worst case within the ball: the boundary point along e₁
    let mut x = vec![0.0; d];
    x[0] = delta_d;
    let ux: f64 = x.iter().map(|v| v * v).sum::<f64>() / (2.0 * sigma0 * sigma0);
    let mut acc_sum = 0.0f64;
    let mut acc_sumsq = 0.0f64;
    for i in 0..samples {
        let mut rng = stream_rng(seed, i as u64, 0xce11);
        let z = normal_vec(&mut rng, d);
        let uw: f64 = x
            .iter()
            .zip(&z)
            .map(|(xi, zi)| {
                let wi = xi + sigma_d * zi;
                wi * wi
            })
            .sum::<f64>()
            / (2.0 * sigma0 * sigma0);
        let acc = 1.0f64.min((ux - uw).exp());
        acc_sum += acc;
        acc_sumsq += acc * acc;
    }
    let n = samples as f64;
    let mean = acc_sum / n;
    let var = (acc_sumsq / n - mean * mean).max(0.0);
    let mc_accept = Estimate { value: mean, stderr: (var / n).sqrt(), n_samples: samples, seed };
    AcceptCeilingReport {
        ceiling,
        delta_d,
        mc_accept,
        ok: mean <= ceiling + 3.0 * mc_accept.stderr,
    }
}

/// Heavy-tail floor: for `μ(B(0,ρ)^∁) = ρ^(−t)` and local proposals with
/// `b(K) >= 1 − D·K^(−η)`, the weak conductance obeys
/// `κ(u) <= 2(t+D+o(1))·(2u)^(η/((η+1)t))` and the minimal β satisfies
/// `β*(s) ∈ Ω(s^(−t(η+1)/η))`.
#[derive(Debug, Clone)]
pub struct HeavyTailFloor {
    pub beta_star_exponent: f64,
    pub kappa_envelope: KappaEnvelope,
    /// `(v, scaled bracket value)` at the probe points.
    pub bracket_values: Vec<(f64, f64)>,
    /// Extrapolation of the scaled bracket to `v = 0`; equals `t + D` in
    /// the limit.
    pub extrapolated_limit: f64,
}

pub fn heavy_tail_floor(t: f64, eta: f64, d_const: f64) -> Result<HeavyTailFloor> {
    if !(t > 0.0 && eta > 0.0 && d_const > 0.0) {
        return Err(Error::DomainError("need t, eta, D > 0".into()));
    }
    let theta = eta / ((eta + 1.0) * t);
    let bracket = |v: f64| -> f64 {
        let k = v.powf(-1.0 / (t * (1.0 + eta)));
        let phi_b = (1.0 - d_const * k.powf(-eta)) / (1.0 + v.powf(1.0 / t) * k).powf(t);
        v.powf(-theta) * (1.0 - phi_b)
    };
    let probes = [1e-4, 1e-6, 1e-8];
    let bracket_values: Vec<(f64, f64)> = probes.iter().map(|&v| (v, bracket(v))).collect();
    // linear extrapolation in w = v^theta to w = 0
    let pts: Vec<(f64, f64)> = bracket_values
        .iter()
        .map(|&(v, g)| (v.powf(theta), g))
        .collect();
    let extrapolated_limit = num::linear_intercept(&pts);
    let coef = 2.0 * (t + d_const) * 2f64.powf(theta);
    Ok(HeavyTailFloor {
        beta_star_exponent: t * (eta + 1.0) / eta,
        kappa_envelope: KappaEnvelope::Power { coef, theta },
        bracket_values,
        extrapolated_limit,
    })
}
