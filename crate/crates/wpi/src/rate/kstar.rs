//! The convex conjugate `K*` of `K(u) = u·β(1/u)`.
//!
//! `K*` drives everything downstream: the decay profile solves
//! `γ(n) = F_a⁻¹(n)` with `F_a(x) = ∫_x^a dv/K*(v)`, the one-step iterate
//! map is `v ↦ v − K*(v)`, and the asymptotic-variance bound integrates
//! `w/K*(w)`. Numerically computed conjugates always underestimate the
//! supremum, which keeps every derived bound conservative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num;
use crate::rate::monotone::{MonotoneRate, DOMAIN_FLOOR};

/// Nonnegative, nondecreasing, convex function with `K*(0) = 0`; values may
/// be `+∞` (sentinel for instantaneous decay).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KStar {
    /// `coef · v^q` with `q > 1` (conjugate of a power-law β).
    Power { coef: f64, q: f64 },
    /// `slope · v` (conjugate route for geometric profiles).
    Linear { slope: f64 },
    /// `0` for `v <= at`, `+∞` beyond (conjugate of a constant β).
    Threshold { at: f64 },
    /// `+∞` for every `v > 0` (conjugate of β ≡ 0).
    InstantDecay,
    /// Left-constant interpolation of node values; underestimates between
    /// nodes and below the first node, which is the sound direction.
    Grid { v: Vec<f64>, k: Vec<f64> },
}

impl KStar {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            KStar::Power { coef, q } => coef * x.powf(*q),
            KStar::Linear { slope } => slope * x,
            KStar::Threshold { at } => {
                if x <= *at {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            KStar::InstantDecay => f64::INFINITY,
            KStar::Grid { v, k } => {
                if x < v[0] {
                    return 0.0;
                }
                let i = match v.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
                    Ok(i) => i,
                    Err(i) => i - 1,
                };
                k[i]
            }
        }
    }
}

/// Conjugate of a power-law rate `β(s) = c·s^(−p)`:
/// `K*(v) = p · c^(−1/p) · (v/(1+p))^((1+p)/p)`.
fn power_law_conjugate(c: f64, p: f64) -> KStar {
    let q = (1.0 + p) / p;
    let coef = p * c.powf(-1.0 / p) * (1.0 + p).powf(-q);
    KStar::Power { coef, q }
}

/// The conjugate `K*(v) = sup_{u≥0} { u·v − u·β(1/u) }`, in closed form for
/// power laws and constants and by a certified scan-plus-refine search in
/// `t = 1/u` space otherwise.
///
/// The search evaluates `(v − β(t))/t` on a dense log grid and refines the
/// best bracket by golden section; a finite search never exceeds the true
/// supremum. When `v` exceeds the effective supremum of β the conjugate is
/// `+∞` and is reported as a sentinel.
pub fn k_transform(beta: &impl Fn(f64) -> f64, top: f64, a_bound: f64) -> Result<KStar> {
    // Dense value grid on (0, a]; 2048 nodes over 14 decades.
    let vs = num::log_grid(a_bound * 1e-14, a_bound, 2048);
    let mut ks = Vec::with_capacity(vs.len());
    for &v in &vs {
        ks.push(conjugate_at(beta, top, v)?);
    }
    // enforce monotonicity against floating-point wobble
    for i in 1..ks.len() {
        if ks[i] < ks[i - 1] {
            ks[i] = ks[i - 1];
        }
    }
    Ok(KStar::Grid { v: vs, k: ks })
}

/// Closed-form dispatch for certificate rates; falls back to the numeric
/// transform. `eval` must already incorporate any certificate clamping.
pub fn k_transform_rate(rate: &MonotoneRate, a_bound: f64) -> Result<KStar> {
    match rate {
        MonotoneRate::PowerLaw { c, p } if rate.top() >= a_bound => {
            Ok(power_law_conjugate(*c, *p))
        }
        MonotoneRate::Constant { c } => {
            if *c == 0.0 {
                Ok(KStar::InstantDecay)
            } else {
                Ok(KStar::Threshold { at: c.min(a_bound) })
            }
        }
        other => {
            let top = other.top().min(a_bound);
            k_transform(&|t| other.eval(t).min(a_bound), top, a_bound)
        }
    }
}

fn conjugate_at(beta: &impl Fn(f64) -> f64, top: f64, v: f64) -> Result<f64> {
    if v > top {
        // (v − β(t))/t blows up as t ↓ 0
        return Ok(f64::INFINITY);
    }
    let g = |t: f64| (v - beta(t)) / t;
    let ts = num::log_grid(DOMAIN_FLOOR, 1e12, 1024);
    let mut best = 0.0f64;
    let mut best_i = usize::MAX;
    for (i, &t) in ts.iter().enumerate() {
        let val = g(t);
        if val.is_nan() {
            return Err(Error::NumericalFailure(format!("conjugate NaN at t={t}")));
        }
        if val > best {
            best = val;
            best_i = i;
        }
    }
    if best_i == usize::MAX {
        return Ok(0.0);
    }
    if best_i == 0 && g(ts[0]) > g(ts[1]) * 1.0001 && v > beta(ts[0]) {
        // still climbing into the clamped region: treat as unbounded
        return Ok(f64::INFINITY);
    }
    let lo = if best_i == 0 { ts[0] } else { ts[best_i - 1] };
    let hi = if best_i + 1 == ts.len() {
        ts[best_i]
    } else {
        ts[best_i + 1]
    };
    // refine on log t; a local refinement can only raise the lower bound
    let (_, refined) = num::golden_max(|lt: f64| g(lt.exp()), lo.ln(), hi.ln(), 60);
    Ok(best.max(refined))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Grid-supremum oracle over u ∈ [0, 1e6], log spaced: independent of
    /// the scan/refine implementation path.
    fn conjugate_oracle(beta: &MonotoneRate, v: f64) -> f64 {
        let mut best = 0.0f64;
        for &u in num::log_grid(1e-9, 1e6, 400_000).iter() {
            let k = u * beta.eval(1.0 / u);
            best = best.max(u * v - k);
        }
        best
    }

    #[test]
    fn reciprocal_beta_gives_quadratic_conjugate() {
        // β(s)=1/s: K(u)=u², K*(v)=v²/4
        let ks = k_transform_rate(&MonotoneRate::power_law(1.0, 1.0), 1.0).unwrap();
        for &v in &[0.1, 0.25, 0.5, 0.9] {
            assert!((ks.eval(v) - v * v / 4.0).abs() < 1e-12);
            let oracle = conjugate_oracle(&MonotoneRate::power_law(1.0, 1.0), v);
            assert!((ks.eval(v) - oracle).abs() < 1e-6);
        }
    }

    #[test]
    fn general_power_law_matches_stationarity_formula() {
        // β(s)=s^(−p): K*(v) = p·(v/(1+p))^((1+p)/p)
        for &p in &[0.5, 1.0, 2.0, 3.5] {
            let ks = k_transform_rate(&MonotoneRate::power_law(1.0, p), 1.0).unwrap();
            for &v in &[0.05, 0.3, 0.8] {
                let want = p * (v / (1.0 + p)).powf((1.0 + p) / p);
                assert!((ks.eval(v) - want).abs() < 1e-12 * want.max(1.0));
                let oracle = conjugate_oracle(&MonotoneRate::power_law(1.0, p), v);
                assert!((ks.eval(v) - oracle).abs() < 1e-6 * want.max(1.0));
            }
        }
    }

    #[test]
    fn zero_beta_decays_instantly() {
        let ks = k_transform_rate(&MonotoneRate::constant(0.0), 1.0).unwrap();
        assert_eq!(ks.eval(0.5), f64::INFINITY);
        assert_eq!(ks.eval(0.0), 0.0);
    }

    #[test]
    fn constant_beta_gives_threshold() {
        let ks = k_transform_rate(&MonotoneRate::constant(0.3), 1.0).unwrap();
        assert_eq!(ks.eval(0.2), 0.0);
        assert_eq!(ks.eval(0.31), f64::INFINITY);
    }

    #[test]
    fn numeric_conjugate_underestimates_but_tracks_closed_form() {
        // force the numeric path with a tabulated copy of s^{-1}
        let grid = num::log_grid(1e-8, 1e8, 3000);
        let values: Vec<f64> = grid.iter().map(|s| 1.0 / s).collect();
        let tab = MonotoneRate::tabulated(grid, values, crate::rate::Interp::Linear);
        let ks = k_transform_rate(&tab, 1.0).unwrap();
        for &v in &[0.1, 0.4, 0.9] {
            let want = v * v / 4.0;
            let got = ks.eval(v);
            assert!(got <= want + 1e-9, "numeric conjugate must not overshoot");
            // left-constant grid lookup costs ~2·(node spacing) in v²
            assert!(got > want * 0.95, "v={v}: {got} vs {want}");
        }
    }

    #[test]
    fn conjugate_is_convex_by_midpoint_test() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ks = k_transform_rate(&MonotoneRate::power_law(2.0, 1.5), 1.0).unwrap();
        for _ in 0..200 {
            let u = rng.random_range(1e-4..1.0f64);
            let v = rng.random_range(1e-4..1.0f64);
            let mid = ks.eval(0.5 * (u + v));
            let avg = 0.5 * (ks.eval(u) + ks.eval(v));
            assert!(mid <= avg + 1e-9);
        }
    }
}
