//! WPI constructors from structural hypotheses: Lyapunov drift conditions,
//! local Poincaré inequalities, minorization, isoperimetry and conductance
//! envelopes. Every constructor emits a certificate consumed by the rate
//! calculus, and every hypothesis is machine-verified on finite chains.

use serde::{Deserialize, Serialize};

use crate::chain::{ConductanceProfile, FiniteKernel, MASS_TOL};
use crate::error::{Error, Result};
use crate::num;
use crate::rate::{Interp, MonotoneRate, Sieve, WpiCertificate, OSC_SQ_A_BOUND};

/// Concave, increasing drift modulus φ on `[1, ∞)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConcaveFn {
    /// `φ(v) = c·v^a` with `a ∈ (0, 1]`.
    Power { c: f64, a: f64 },
    /// `φ(v) = c·v/ln(v)^a` beyond its inflection at `v = e^(a+1)`, with a
    /// tangent continuation below so the modulus is concave and increasing
    /// on all of `[1, ∞)`.
    LogQuotient { c: f64, a: f64 },
}

impl ConcaveFn {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            ConcaveFn::Power { c, a } => c * v.powf(*a),
            ConcaveFn::LogQuotient { c, a } => {
                let splice = (a + 1.0).exp();
                if v >= splice {
                    c * v / v.ln().powf(*a)
                } else {
                    let f0 = c * splice / (a + 1.0).powf(*a);
                    let slope = c * (a + 1.0).powf(-(a + 1.0));
                    f0 + slope * (v - splice)
                }
            }
        }
    }

    /// `(Id/φ)⁻¹(s)`: closed form for powers, monotone bisection otherwise.
    /// Errors when `s` falls below the infimum of `v/φ(v)` on `[1, ∞)`.
    pub fn id_over_phi_inverse(&self, s: f64, v_hi: f64) -> Result<f64> {
        let g = |v: f64| v / self.eval(v);
        let g1 = g(1.0);
        if s < g1 * (1.0 - 1e-12) {
            return Err(Error::RangeError(format!(
                "s' = {s} below inf v/phi(v) = {g1}"
            )));
        }
        let s = s.max(g1);
        match self {
            ConcaveFn::Power { c, a } => Ok((c * s).powf(1.0 / (1.0 - a))),
            ConcaveFn::LogQuotient { .. } => {
                // v/φ(v) is increasing for concave increasing φ; expand the
                // bracket from the hint until it straddles s
                let mut hi = v_hi.max(2.0);
                while g(hi) < s && hi < 1e300 {
                    hi *= 4.0;
                }
                if g(hi) < s {
                    return Err(Error::RangeError(format!(
                        "s' = {s} beyond the representable range of v/phi(v)"
                    )));
                }
                let mut lo = 1.0f64;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if g(mid) >= s {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
        }
    }

    /// Sampled concavity/monotonicity check on `[1, v_hi]`.
    pub fn check_shape(&self, v_hi: f64) -> Result<()> {
        let grid = num::log_grid(1.0, v_hi.max(2.0), 256);
        let vals: Vec<f64> = grid.iter().map(|v| self.eval(*v)).collect();
        for (w, g) in vals.windows(2).zip(grid.windows(2)) {
            if w[1] < w[0] * (1.0 - 1e-12) {
                return Err(Error::ShapeViolation(format!("phi decreases near v = {}", g[0])));
            }
        }
        for i in 0..grid.len() - 2 {
            let s0 = (vals[i + 1] - vals[i]) / (grid[i + 1] - grid[i]);
            let s1 = (vals[i + 2] - vals[i + 1]) / (grid[i + 2] - grid[i + 1]);
            if s1 > s0 * (1.0 + 1e-9) + 1e-12 {
                return Err(Error::ShapeViolation(format!(
                    "phi is not concave near v = {}",
                    grid[i + 1]
                )));
            }
        }
        Ok(())
    }
}

/// Drift hypothesis on a Lyapunov function `V >= 1` and small set `C`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DriftForm {
    /// `PV <= (1−λ)V + b·1_C`.
    Geometric { lambda: f64, b: f64 },
    /// `PV <= V − φ∘V + b·1_C`.
    Subgeometric { phi: ConcaveFn, b: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftCondition {
    pub v: Vec<f64>,
    /// Indices of the small set `C`.
    pub c_set: Vec<usize>,
    pub form: DriftForm,
}

/// Pointwise drift verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftReport {
    /// `RHS − PV` per state; all entries nonnegative when the drift holds.
    pub slack: Vec<f64>,
    pub min_slack: f64,
    /// `μ(φ∘V)` and `b·μ(C)` in the subgeometric case, where the former is
    /// dominated by the latter whenever the drift holds.
    pub mu_phi_v: Option<f64>,
    pub b_mu_c: Option<f64>,
    /// The drift was checked for `(P + P*)/2` because `P` is nonreversible.
    pub via_reversibilization: bool,
}

/// Verify a drift condition pointwise on the positive-mass states.
/// Nonreversible kernels are routed through the additive
/// reversibilization, for which the same conclusions hold.
pub fn verify_drift(kernel: &FiniteKernel, dc: &DriftCondition) -> Result<DriftReport> {
    if dc.v.len() != kernel.n() {
        return Err(Error::DomainError("V length mismatch".into()));
    }
    if dc.v.iter().any(|v| *v < 1.0 - 1e-12) {
        return Err(Error::DomainError("V must be >= 1 everywhere".into()));
    }
    let via_reversibilization = !kernel.is_reversible();
    let target = if via_reversibilization {
        kernel.additive_reversibilization()?
    } else {
        kernel.clone()
    };
    let mut in_c = vec![false; kernel.n()];
    for &x in &dc.c_set {
        in_c[x] = true;
    }
    let pv = target.apply(&dc.v);
    let mut slack = vec![0.0; kernel.n()];
    let mut min_slack = f64::INFINITY;
    let mut worst = 0usize;
    for x in 0..kernel.n() {
        if kernel.mu()[x] <= MASS_TOL {
            continue;
        }
        let rhs = match &dc.form {
            DriftForm::Geometric { lambda, b } => {
                (1.0 - lambda) * dc.v[x] + if in_c[x] { *b } else { 0.0 }
            }
            DriftForm::Subgeometric { phi, b } => {
                dc.v[x] - phi.eval(dc.v[x]) + if in_c[x] { *b } else { 0.0 }
            }
        };
        slack[x] = rhs - pv[x];
        if slack[x] < min_slack {
            min_slack = slack[x];
            worst = x;
        }
    }
    if min_slack < -1e-10 {
        return Err(Error::DriftViolated { state: worst, slack: min_slack });
    }
    let (mu_phi_v, b_mu_c) = match &dc.form {
        DriftForm::Subgeometric { phi, b } => {
            let mu_phi: f64 = (0..kernel.n())
                .map(|x| kernel.mu()[x] * phi.eval(dc.v[x]))
                .sum();
            let mu_c: f64 = dc.c_set.iter().map(|&x| kernel.mu()[x]).sum();
            if mu_phi > b * mu_c + 1e-10 {
                return Err(Error::AssumptionViolated(format!(
                    "mu(phi∘V) = {mu_phi:.6e} exceeds b·mu(C) = {:.6e}",
                    b * mu_c
                )));
            }
            (Some(mu_phi), Some(b * mu_c))
        }
        DriftForm::Geometric { .. } => (None, None),
    };
    Ok(DriftReport { slack, min_slack, mu_phi_v, b_mu_c, via_reversibilization })
}

/// Where a local Poincaré constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalPiFlavor {
    /// Inherited from a restricted Poincaré inequality for `P_C`.
    Restricted,
    /// Stated directly.
    Local,
    /// `K = 2/ε` from a minorization `P(x,·) >= ε·ν(·)` on `C`.
    FromMinorization,
}

/// Local Poincaré inequality `‖f_m·1_C‖² <= K·E(P,f)` with the restricted
/// mean `m = μ(f·1_C)/μ(C)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalPI {
    pub c_set: Vec<usize>,
    pub constant: f64,
    pub flavor: LocalPiFlavor,
}

impl LocalPI {
    /// Verify the claimed inequality on random observables.
    pub fn verify(&self, kernel: &FiniteKernel, trials: usize, seed: u64) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mu_c: f64 = self.c_set.iter().map(|&x| kernel.mu()[x]).sum();
        if mu_c <= MASS_TOL {
            return Err(Error::EmptyRestriction);
        }
        let mut in_c = vec![false; kernel.n()];
        for &x in &self.c_set {
            in_c[x] = true;
        }
        for t in 0..trials {
            let f: Vec<f64> = (0..kernel.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let m: f64 = (0..kernel.n())
                .filter(|&x| in_c[x])
                .map(|x| kernel.mu()[x] * f[x])
                .sum::<f64>()
                / mu_c;
            let lhs: f64 = (0..kernel.n())
                .filter(|&x| in_c[x])
                .map(|x| kernel.mu()[x] * (f[x] - m) * (f[x] - m))
                .sum();
            let rhs = self.constant * kernel.dirichlet_form(&f);
            if lhs > rhs + 1e-10 {
                return Err(Error::AssumptionViolated(format!(
                    "local PI fails on trial {t}: {lhs:.6e} > {rhs:.6e}"
                )));
            }
        }
        Ok(())
    }

    /// Local PI from the spectral gap of the restriction `P_C` (reversible
    /// kernels): `K = 1/Gap(P_C)`. A singleton `C` has infinite gap and
    /// the constant degenerates to zero (the restricted variance vanishes
    /// identically there).
    pub fn from_restricted_gap(kernel: &FiniteKernel, c_set: Vec<usize>) -> Result<Self> {
        let gap = kernel.restricted_gap(&c_set)?;
        if gap <= 0.0 {
            return Err(Error::ZeroConductance("restriction has no spectral gap".into()));
        }
        let constant = if gap.is_infinite() { 0.0 } else { 1.0 / gap };
        Ok(LocalPI { c_set, constant, flavor: LocalPiFlavor::Restricted })
    }
}

/// Local PI from a minorization `P(x,·) >= ε·ν(·)·1{x ∈ C}`: `K = 2/ε`.
///
/// When `nu` is omitted the optimal Doeblin component
/// `ν(y) ∝ min_{x∈C} P(x,y)` is used; a requested `epsilon` is checked
/// against the available overlap.
pub fn local_pi_from_minorization(
    kernel: &FiniteKernel,
    c_set: Vec<usize>,
    epsilon: Option<f64>,
    nu: Option<&[f64]>,
) -> Result<LocalPI> {
    if c_set.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let available = match nu {
        Some(nu) => {
            let mut eps = f64::INFINITY;
            let mut worst = c_set[0];
            for &x in &c_set {
                for (y, &w) in nu.iter().enumerate() {
                    if w > 0.0 {
                        let r = kernel.at(x, y) / w;
                        if r < eps {
                            eps = r;
                            worst = x;
                        }
                    }
                }
            }
            if eps <= 0.0 {
                return Err(Error::MinorizationFails { row: worst, available: eps });
            }
            eps
        }
        None => {
            let overlap: f64 = (0..kernel.n())
                .map(|y| {
                    c_set
                        .iter()
                        .map(|&x| kernel.at(x, y))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            if overlap <= 0.0 {
                return Err(Error::MinorizationFails { row: c_set[0], available: overlap });
            }
            overlap
        }
    };
    let eps = match epsilon {
        Some(e) => {
            if e > available + 1e-12 {
                return Err(Error::MinorizationFails { row: c_set[0], available });
            }
            e
        }
        None => available.min(1.0),
    };
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::DomainError(format!("epsilon must be in (0,1], got {eps}")));
    }
    Ok(LocalPI { c_set, constant: 2.0 / eps, flavor: LocalPiFlavor::FromMinorization })
}

/// Spectral-gap lower bound `λ/(1+Kb)` from a geometric drift and a local
/// PI. When a kernel is supplied both hypotheses are verified and the
/// bound is checked against the exact gap.
pub fn spi_from_drift(
    kernel: Option<&FiniteKernel>,
    dc: &DriftCondition,
    lpi: &LocalPI,
) -> Result<f64> {
    let (lambda, b) = match &dc.form {
        DriftForm::Geometric { lambda, b } => (*lambda, *b),
        DriftForm::Subgeometric { .. } => {
            return Err(Error::DomainError("geometric drift required".into()))
        }
    };
    if !(lambda > 0.0 && lambda <= 1.0 && b > 0.0) {
        return Err(Error::DomainError("need lambda in (0,1] and b > 0".into()));
    }
    let bound = lambda / (1.0 + lpi.constant * b);
    if let Some(k) = kernel {
        gate_on_irreducibility(k)?;
        verify_drift(k, dc)?;
        lpi.verify(k, 100, 0x5eed)?;
        if k.is_reversible() {
            let gap = k.right_spectral_gap()?;
            if bound > gap + 1e-9 {
                return Err(Error::AssumptionViolated(format!(
                    "drift gap bound {bound:.6e} exceeds exact gap {gap:.6e}"
                )));
            }
        }
    }
    Ok(bound)
}

/// β-form WPI from a subgeometric drift condition and a local PI:
/// `β(s) = b·μ(C)/φ∘(Id/φ)⁻¹(s/(1+Kb))`, tabulated on a log grid with the
/// trivial bound below the range of `Id/φ`.
///
/// At the regime boundary `φ(v) = c·v` the construction degenerates to the
/// geometric drift and the certificate becomes the step function of the
/// spectral-gap bound `λ/(1+Kb)`.
pub fn wpi_from_drift(
    kernel: Option<&FiniteKernel>,
    dc: &DriftCondition,
    lpi: &LocalPI,
    mu_c: f64,
) -> Result<WpiCertificate> {
    let (phi, b) = match &dc.form {
        DriftForm::Subgeometric { phi, b } => (phi, *b),
        DriftForm::Geometric { .. } => {
            let rate = spi_step_rate(spi_from_drift(kernel, dc, lpi)?);
            return WpiCertificate::beta(Sieve::OscSq, rate, OSC_SQ_A_BOUND);
        }
    };
    if let ConcaveFn::Power { c, a } = phi {
        if (*a - 1.0).abs() < 1e-12 {
            let geo = DriftCondition {
                v: dc.v.clone(),
                c_set: dc.c_set.clone(),
                form: DriftForm::Geometric { lambda: *c, b },
            };
            let rate = spi_step_rate(spi_from_drift(kernel, &geo, lpi)?);
            return WpiCertificate::beta(Sieve::OscSq, rate, OSC_SQ_A_BOUND);
        }
    }
    let v_hi = dc.v.iter().cloned().fold(1.0f64, f64::max) * 1e3;
    phi.check_shape(v_hi)?;
    if let Some(k) = kernel {
        gate_on_irreducibility(k)?;
        verify_drift(k, dc)?;
        lpi.verify(k, 100, 0x5eed)?;
    }
    let kb = 1.0 + lpi.constant * b;
    let b_mu_c = b * mu_c;
    // the formula activates once s/(1+Kb) enters the range of Id/φ
    let s_lo = kb * 1.0 / phi.eval(1.0);
    let mut grid = Vec::new();
    let mut values = Vec::new();
    grid.push(s_lo * (1.0 - 1e-9));
    values.push(OSC_SQ_A_BOUND);
    for &s in num::log_grid(s_lo, s_lo.max(1.0) * 1e10, 2048).iter() {
        // past the representable range of v/phi(v) the tabulation stops;
        // the step function then extends with its last (larger) value,
        // which keeps the certificate sound
        let v_star = match phi.id_over_phi_inverse(s / kb, v_hi * 1e6) {
            Ok(v) => v,
            Err(Error::RangeError(_)) if !grid.is_empty() && s > s_lo * 10.0 => break,
            Err(e) => return Err(e),
        };
        let val = (b_mu_c / phi.eval(v_star)).min(OSC_SQ_A_BOUND);
        if s > *grid.last().unwrap() {
            grid.push(s);
            values.push(val);
        }
    }
    // clamp roundoff wobble at the activation knee
    for i in 1..values.len() {
        if values[i] > values[i - 1] {
            values[i] = values[i - 1];
        }
    }
    WpiCertificate::beta(
        Sieve::OscSq,
        MonotoneRate::tabulated(grid, values, Interp::Step),
        OSC_SQ_A_BOUND,
    )
}

/// The drift theorems assume a unique invariant probability measure; on a
/// reducible finite chain uniqueness fails, so the constructors refuse.
fn gate_on_irreducibility(kernel: &FiniteKernel) -> Result<()> {
    let rep = crate::chain::rupi_check(kernel);
    if !rep.irreducible {
        return Err(Error::AssumptionViolated(format!(
            "chain is reducible (witness pair {:?}); the invariant measure is not unique",
            rep.witness
        )));
    }
    Ok(())
}

/// SPI expressed as a β step: trivial bound below `1/gap`, zero beyond.
fn spi_step_rate(gap_bound: f64) -> MonotoneRate {
    let s0 = 1.0 / gap_bound;
    MonotoneRate::tabulated(
        vec![s0 * (1.0 - 1e-12), s0],
        vec![OSC_SQ_A_BOUND, 0.0],
        Interp::Step,
    )
}

/// The two conductance prefactors from isoperimetry under the
/// TV-continuity hypothesis `‖P(z,·) − P(z′,·)‖_TV < 1 − ε` for
/// `|z − z′| <= δ` inside an `m`-strongly log-concave target restricted to
/// a convex `C`:
///
/// - `min_form`  pairs with `min{μ(A∩C), μ(A^∁∩C)}`,
/// - `product_form` pairs with `μ(A∩C)·μ(A^∁∩C)`,
///
/// and `κ(0) >= product_form` when `C` is the whole space.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IsoBounds {
    pub min_form: f64,
    pub product_form: f64,
}

pub fn conductance_from_isoperimetry(eps: f64, delta: f64, m: f64, mu_c: f64) -> IsoBounds {
    assert!(eps > 0.0 && delta > 0.0 && m > 0.0 && mu_c > 0.0 && mu_c <= 1.0);
    let ln2 = std::f64::consts::LN_2;
    let min_form = eps / 4.0 * 1.0f64.min(ln2 / 8.0 * delta * m.sqrt());
    let product_form = eps / (4.0 * mu_c) * 1.0f64.min(ln2 / 4.0 * delta * m.sqrt());
    IsoBounds { min_form, product_form }
}

/// Analytic or enumerated κ envelopes accepted by
/// [`wpi_from_conductance`].
#[derive(Debug, Clone)]
pub enum KappaEnvelope {
    Enumerated(ConductanceProfile),
    /// `κ(u) = coef·u^theta`.
    Power { coef: f64, theta: f64 },
    Constant(f64),
}

impl KappaEnvelope {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            KappaEnvelope::Enumerated(p) => p.kappa(u),
            KappaEnvelope::Power { coef, theta } => {
                if u >= 0.25 {
                    f64::INFINITY
                } else {
                    coef * u.powf(*theta)
                }
            }
            KappaEnvelope::Constant(c) => {
                if u >= 0.25 {
                    f64::INFINITY
                } else {
                    *c
                }
            }
        }
    }
}

/// α-form WPI `α(r) = 16/κ²(r/16)` from a conductance function, in closed
/// form for power-law and constant envelopes.
pub fn wpi_from_conductance(env: &KappaEnvelope) -> Result<WpiCertificate> {
    let rate = match env {
        KappaEnvelope::Enumerated(profile) => profile.to_alpha_rate()?,
        KappaEnvelope::Power { coef, theta } => {
            if *coef <= 0.0 {
                return Err(Error::ZeroConductance("power envelope has no mass".into()));
            }
            // 16/(c·(r/16)^θ)² = 16^(1+2θ)/c² · r^(−2θ)
            MonotoneRate::power_law(16f64.powf(1.0 + 2.0 * theta) / (coef * coef), 2.0 * theta)
        }
        KappaEnvelope::Constant(c) => {
            if *c <= 0.0 {
                return Err(Error::ZeroConductance("constant envelope has no mass".into()));
            }
            MonotoneRate::constant(16.0 / (c * c))
        }
    };
    WpiCertificate::alpha(Sieve::OscSq, rate, OSC_SQ_A_BOUND)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn trivial_drift_on_independent_kernel() {
        // P = Π, V ≡ 1, λ <= 1, b = λ, C = everything: zero slack structure
        let k = FiniteKernel::independent(vec![0.25, 0.25, 0.5]).unwrap();
        let dc = DriftCondition {
            v: vec![1.0; 3],
            c_set: vec![0, 1, 2],
            form: DriftForm::Geometric { lambda: 0.8, b: 0.8 },
        };
        let rep = verify_drift(&k, &dc).unwrap();
        assert!(rep.min_slack.abs() < 1e-12);
        assert!(!rep.via_reversibilization);
    }

    #[test]
    fn engineered_geometric_drift_verifies_and_bounds_gap() {
        // birth-death chain with strong inward drift
        let n = 12usize;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            let up = if i + 1 < n { 0.15 } else { 0.0 };
            let down = if i > 0 { 0.45 } else { 0.0 };
            rows[i][i] = 1.0 - up - down;
            if i + 1 < n {
                rows[i][i + 1] = up;
            }
            if i > 0 {
                rows[i][i - 1] = down;
            }
        }
        let k = FiniteKernel::from_rows(rows).unwrap();
        assert!(k.is_reversible());
        let growth: f64 = 1.5;
        let v: Vec<f64> = (0..n).map(|i| growth.powi(i as i32)).collect();
        let dc = DriftCondition {
            v: v.clone(),
            c_set: vec![0],
            form: DriftForm::Geometric { lambda: 0.05, b: 0.2 },
        };
        verify_drift(&k, &dc).unwrap();
        let lpi = LocalPI::from_restricted_gap(&k, vec![0, 1]).unwrap();
        let bound = spi_from_drift(Some(&k), &dc, &lpi).unwrap();
        let gap = k.right_spectral_gap().unwrap();
        assert!(bound > 0.0 && bound <= gap + 1e-12, "{bound} vs {gap}");
    }

    #[test]
    fn drift_gap_bound_dominated_on_engineered_sweep() {
        // ten inward-drift birth-death chains with varying pull and size
        for (idx, (n, up, down)) in [
            (8usize, 0.10, 0.40),
            (10, 0.15, 0.45),
            (12, 0.12, 0.36),
            (14, 0.20, 0.50),
            (16, 0.08, 0.40),
            (9, 0.18, 0.54),
            (11, 0.10, 0.50),
            (13, 0.16, 0.40),
            (15, 0.11, 0.44),
            (17, 0.09, 0.45),
        ]
        .into_iter()
        .enumerate()
        {
            let mut rows = vec![vec![0.0; n]; n];
            for i in 0..n {
                let u = if i + 1 < n { up } else { 0.0 };
                let d = if i > 0 { down } else { 0.0 };
                rows[i][i] = 1.0 - u - d;
                if i + 1 < n {
                    rows[i][i + 1] = u;
                }
                if i > 0 {
                    rows[i][i - 1] = d;
                }
            }
            let k = FiniteKernel::from_rows(rows).unwrap();
            let growth = down / up;
            let ratio = growth.sqrt(); // balances the up/down drift terms
            let v: Vec<f64> = (0..n).map(|i| ratio.powi(i as i32)).collect();
            // calibrate the drift rate off the small set {0, 1}
            let pv = k.apply(&v);
            let lambda = (2..n)
                .map(|i| (v[i] - pv[i]) / v[i])
                .fold(f64::INFINITY, f64::min);
            assert!(lambda > 0.0, "case {idx}: drift must be genuine");
            let b = (0..2)
                .map(|i| pv[i] - (1.0 - lambda) * v[i])
                .fold(0.0f64, f64::max)
                .max(1e-9);
            let dc = DriftCondition {
                v,
                c_set: vec![0, 1],
                form: DriftForm::Geometric { lambda, b },
            };
            let lpi = LocalPI::from_restricted_gap(&k, vec![0, 1]).unwrap();
            let bound = spi_from_drift(Some(&k), &dc, &lpi).unwrap();
            let gap = k.right_spectral_gap().unwrap();
            assert!(
                bound > 0.0 && bound <= gap + 1e-12,
                "case {idx}: {bound} vs gap {gap}"
            );
        }
    }

    #[test]
    fn drift_violation_names_the_worst_state() {
        let k = FiniteKernel::two_state(0.5, 0.5).unwrap();
        let dc = DriftCondition {
            v: vec![1.0, 10.0],
            c_set: vec![],
            form: DriftForm::Geometric { lambda: 0.9, b: 1.0 },
        };
        match verify_drift(&k, &dc) {
            Err(Error::DriftViolated { state, .. }) => assert_eq!(state, 0),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn k_to_zero_limit_recovers_lambda() {
        let dc = DriftCondition {
            v: vec![1.0, 1.0],
            c_set: vec![0],
            form: DriftForm::Geometric { lambda: 0.5, b: 1.0 },
        };
        let lpi = LocalPI { c_set: vec![0], constant: 1e-12, flavor: LocalPiFlavor::Local };
        let bound = spi_from_drift(None, &dc, &lpi).unwrap();
        assert!((bound - 0.5).abs() < 1e-9);
        // λ = 0.5, K = 2, b = 1: bound = 1/6
        let lpi2 = LocalPI { c_set: vec![0], constant: 2.0, flavor: LocalPiFlavor::Local };
        let bound2 = spi_from_drift(None, &dc, &lpi2).unwrap();
        assert!((bound2 - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn minorization_constant_is_two_over_eps() {
        // atom with a common row: eps = 1, K = 2
        let k = FiniteKernel::independent(vec![0.5, 0.5]).unwrap();
        let lpi = local_pi_from_minorization(&k, vec![0, 1], None, None).unwrap();
        assert!((lpi.constant - 2.0).abs() < 1e-12);
        lpi.verify(&k, 500, 7).unwrap();
    }

    #[test]
    fn doeblin_mixture_recovers_eps() {
        use rand::Rng;
        // P = eps·nu + (1−eps)·R
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(40);
        let eps = 0.3;
        let nu = [0.2, 0.5, 0.3];
        let mut rows = Vec::new();
        for _ in 0..3 {
            let mut r: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|v| *v /= s);
            rows.push((0..3).map(|j| eps * nu[j] + (1.0 - eps) * r[j]).collect());
        }
        let k = FiniteKernel::from_rows(rows).unwrap();
        let lpi = local_pi_from_minorization(&k, vec![0, 1, 2], Some(eps), Some(&nu)).unwrap();
        assert!((lpi.constant - 2.0 / eps).abs() < 1e-12);
        lpi.verify(&k, 500, 11).unwrap();
        // requesting more overlap than available fails with a witness
        assert!(matches!(
            local_pi_from_minorization(&k, vec![0, 1, 2], Some(0.99), Some(&nu)),
            Err(Error::MinorizationFails { .. })
        ));
    }

    #[test]
    fn power_drift_beta_has_the_predicted_exponent() {
        // φ(v) = c·v^a: β(s) ∝ s^(−a/(1−a))
        let (c, a) = (0.5, 0.6);
        let dc = DriftCondition {
            v: vec![1.0, 2.0, 4.0],
            c_set: vec![0],
            form: DriftForm::Subgeometric { phi: ConcaveFn::Power { c, a }, b: 0.7 },
        };
        let lpi = LocalPI { c_set: vec![0], constant: 3.0, flavor: LocalPiFlavor::Local };
        let cert = wpi_from_drift(None, &dc, &lpi, 0.4).unwrap();
        let ss = num::log_grid(1e3, 1e8, 40);
        let vals: Vec<f64> = ss.iter().map(|s| cert.eval_beta(*s)).collect();
        let slope = num::loglog_slope(&ss, &vals);
        assert!((slope + a / (1.0 - a)).abs() < 0.02, "slope {slope}");
        // closed form: β(s) = bμC/(c·(c·s/(1+Kb))^{a/(1−a)})
        let kb = 1.0 + 3.0 * 0.7;
        let s = ss[20];
        let want = 0.7 * 0.4 / (c * (c * s / kb).powf(a / (1.0 - a)));
        let got = cert.eval_beta(s);
        assert!((got - want).abs() < 2e-2 * want, "{got} vs {want}");
    }

    #[test]
    fn log_quotient_drift_decays_stretched_exponentially() {
        // φ(v) = c·v/ln(v)^a: β(s) ∝ s·exp(−(cs′)^{1/a})
        let (c, a) = (0.8, 2.0);
        let dc = DriftCondition {
            v: vec![10.0, 90.0, 810.0],
            c_set: vec![0],
            form: DriftForm::Subgeometric { phi: ConcaveFn::LogQuotient { c, a }, b: 1.0 },
        };
        let lpi = LocalPI { c_set: vec![0], constant: 1.0, flavor: LocalPiFlavor::Local };
        let cert = wpi_from_drift(None, &dc, &lpi, 0.5).unwrap();
        let kb = 2.0;
        for &s in &[200.0, 800.0, 3200.0] {
            let sp = s / kb;
            // v* solves v/φ(v) = s′, i.e. ln(v)^a = c·s′ beyond the splice
            let v_star = ((c * sp).powf(1.0 / a)).exp();
            let want = (0.5 / (c * v_star / v_star.ln().powf(a))).min(1.0);
            let got = cert.eval_beta(s);
            assert!(
                (got - want).abs() < 5e-2 * want.max(1e-12),
                "s={s}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn alpha_one_boundary_delegates_to_geometric() {
        let k = FiniteKernel::independent(vec![0.5, 0.5]).unwrap();
        let dc = DriftCondition {
            v: vec![1.0, 1.0],
            c_set: vec![0, 1],
            form: DriftForm::Subgeometric { phi: ConcaveFn::Power { c: 0.4, a: 1.0 }, b: 0.4 },
        };
        let lpi = LocalPI { c_set: vec![0, 1], constant: 2.0, flavor: LocalPiFlavor::Local };
        let cert = wpi_from_drift(Some(&k), &dc, &lpi, 1.0).unwrap();
        // geometric bound λ/(1+Kb) = 0.4/1.8; β vanishes past its inverse
        let s0 = 1.8 / 0.4;
        assert_eq!(cert.eval_beta(s0 * 1.01), 0.0);
        assert!(cert.eval_beta(s0 * 0.9) > 0.0);
    }

    #[test]
    fn drift_knee_matches_geometric_constant_near_boundary() {
        // a → 1: the activation knee of the subgeometric β approaches the
        // geometric cutoff (1+Kb)/c within 5%; parameters keep the target
        // level b·μ(C)/c below the trivial sieve bound
        let (c, b, kcap) = (0.8, 0.2, 2.0);
        let lpi = LocalPI { c_set: vec![0], constant: kcap, flavor: LocalPiFlavor::Local };
        let dc = DriftCondition {
            v: vec![1.0, 2.0],
            c_set: vec![0],
            form: DriftForm::Subgeometric { phi: ConcaveFn::Power { c, a: 0.99 }, b },
        };
        let cert = wpi_from_drift(None, &dc, &lpi, 1.0).unwrap();
        let kb = 1.0 + kcap * b;
        let knee = kb / c; // where (c·s′)^{a/(1−a)} crosses 1
        let target = b / c; // β at the knee in the a → 1 limit
        let ss = num::log_grid(knee * 0.2, knee * 5.0, 4000);
        let mut crossing = f64::NAN;
        for &s in &ss {
            if cert.eval_beta(s) <= target {
                crossing = s;
                break;
            }
        }
        assert!(
            (crossing - knee).abs() <= 0.05 * knee,
            "crossing {crossing} vs geometric knee {knee}"
        );
    }

    #[test]
    fn iso_instantiations_reproduce_the_rwm_constants() {
        // general-convex chain of constants: ε = 1/32, δ = (σ/16)·d^{-1/2}
        // gives product_form = (ln2/8192)·ς·sqrt(m/(L·d)) ≈ 8.46e-5·(...)
        let (m, l, d, vs) = (0.7f64, 1.3f64, 9.0f64, 0.073f64);
        let sigma = vs / l.sqrt();
        let b = conductance_from_isoperimetry(1.0 / 32.0, sigma / 16.0 / d.sqrt(), m, 1.0);
        let per_unit = b.product_form / (vs * (m / (l * d)).sqrt());
        assert!((8.46e-5..8.462e-5).contains(&per_unit), "{per_unit}");
        // gaussian chain of constants: ε = v/2, δ = v·σ·d^{-1/2} gives the
        // prefactor (1/4)(1−1/e)²·ln2/32 ≈ 0.00216
        let v: f64 = 0.5 * (1.0 - (-1.0f64).exp()); // at unit exponential
        let g = conductance_from_isoperimetry(v / 2.0, v / d.sqrt(), 1.0, 1.0);
        let prefactor = g.product_form / (1.0 / d.sqrt());
        let want = 0.25 * (1.0 - (-1.0f64).exp()).powi(2) * std::f64::consts::LN_2 / 32.0;
        assert!((prefactor - want).abs() < 1e-12);
        assert!((0.00216..0.002165).contains(&want), "{want}");
    }

    #[test]
    fn iso_prefactors_and_saturation() {
        // δ√m >= 8/log2 saturates the min at 1: prefactor = ε/4
        let b = conductance_from_isoperimetry(0.2, 12.0, 1.0, 1.0);
        assert!((b.min_form - 0.05).abs() < 1e-12);
        let base = conductance_from_isoperimetry(0.1, 0.1, 1.0, 1.0);
        for (e, d, m) in [(0.2, 0.1, 1.0), (0.1, 0.2, 1.0), (0.1, 0.1, 2.0)] {
            let other = conductance_from_isoperimetry(e, d, m, 1.0);
            assert!(other.min_form >= base.min_form - 1e-15);
            assert!(other.product_form >= base.product_form - 1e-15);
        }
    }

    #[test]
    fn kappa_power_envelope_alpha_closed_form() {
        let env = KappaEnvelope::Power { coef: 0.7, theta: 1.3 };
        let cert = wpi_from_conductance(&env).unwrap();
        for &r in &[1e-4, 1e-2, 0.5] {
            let kappa = 0.7 * (r / 16.0f64).powf(1.3);
            let want = 16.0 / (kappa * kappa);
            assert!((cert.eval_alpha(r) - want).abs() < 1e-9 * want);
        }
    }

    #[test]
    fn kappa_constant_envelope_gives_spi_like_alpha() {
        let cert = wpi_from_conductance(&KappaEnvelope::Constant(0.5)).unwrap();
        assert!((cert.eval_alpha(0.1) - 64.0).abs() < 1e-12);
        assert!(matches!(
            wpi_from_conductance(&KappaEnvelope::Constant(0.0)),
            Err(Error::ZeroConductance(_))
        ));
    }

    #[test]
    fn nonreversible_drift_goes_through_reversibilization() {
        let k = FiniteKernel::cycle(4).unwrap().lazy(0.2).unwrap();
        assert!(!k.is_reversible());
        let dc = DriftCondition {
            v: vec![1.0; 4],
            c_set: vec![0, 1, 2, 3],
            form: DriftForm::Geometric { lambda: 0.5, b: 0.5 },
        };
        let rep = verify_drift(&k, &dc).unwrap();
        assert!(rep.via_reversibilization);
    }

    #[test]
    fn subgeometric_drift_constructor_end_to_end() {
        // Lamperti-style birth-death chain: V(i) = (i+1)^k satisfies a
        // power drift with a = (k−2)/k
        let n = 60usize;
        let h = 3.5;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            let x = (i + 4) as f64;
            let up = if i + 1 < n { 0.25 * (1.0 - h / x) } else { 0.0 };
            let down = if i > 0 { 0.25 * (1.0 + h / x) } else { 0.0 };
            rows[i][i] = 1.0 - up - down;
            if i + 1 < n {
                rows[i][i + 1] = up;
            }
            if i > 0 {
                rows[i][i - 1] = down;
            }
        }
        let kern = FiniteKernel::from_rows(rows).unwrap();
        assert!(kern.is_reversible());
        let kexp = 5.0f64;
        let v: Vec<f64> = (0..n).map(|i| ((i + 4) as f64).powf(kexp)).collect();
        let a = (kexp - 2.0) / kexp;
        // calibrate c and b against the measured drift, then verify
        let pv = kern.apply(&v);
        let c_set: Vec<usize> = (0..6).collect();
        let mut c_drift = f64::INFINITY;
        for i in 6..n {
            c_drift = c_drift.min((v[i] - pv[i]) / v[i].powf(a));
        }
        assert!(c_drift > 0.0, "engineered drift must be genuine");
        let phi = ConcaveFn::Power { c: c_drift, a };
        let b = (0..6)
            .map(|i| pv[i] - v[i] + phi.eval(v[i]))
            .fold(0.0f64, f64::max)
            .max(1e-6);
        let dc = DriftCondition {
            v,
            c_set: c_set.clone(),
            form: DriftForm::Subgeometric { phi, b },
        };
        verify_drift(&kern, &dc).unwrap();
        let lpi = LocalPI::from_restricted_gap(&kern, c_set.clone()).unwrap();
        lpi.verify(&kern, 200, 3).unwrap();
        let mu_c: f64 = c_set.iter().map(|&x| kern.mu()[x]).sum();
        let cert = wpi_from_drift(Some(&kern), &dc, &lpi, mu_c).unwrap();
        // β decreasing to 0 with the predicted polynomial exponent
        let knee = (1.0 + lpi.constant * b) / c_drift;
        let ss = num::log_grid(knee * 1e2, knee * 1e6, 30);
        let vals: Vec<f64> = ss.iter().map(|s| cert.eval_beta(*s)).collect();
        assert!(vals[0] > *vals.last().unwrap());
        let slope = num::loglog_slope(&ss, &vals);
        assert!((slope + a / (1.0 - a)).abs() < 0.05, "slope {slope}");
    }
}
