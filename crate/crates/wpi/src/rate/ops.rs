//! Derived operations: decay profiles from β, iterate bounds, converses
//! from observed rates, Lᵖ extension, asymptotic-variance and spectral-mass
//! bounds, and rate ordering.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num;
use crate::rate::certificate::{
    ConvergenceProfile, Parametrization, ProfileOrigin, WpiCertificate,
};
use crate::rate::kstar::{k_transform_rate, KStar};
use crate::rate::monotone::{Interp, MonotoneRate};

/// Decay profile `γ(n) = F_a⁻¹(n)`, `F_a(x) = ∫_x^a dv/K*(v)`, for
/// `n = 0..=n_max`.
///
/// Closed forms are used for power-law and geometric conjugates; otherwise
/// `F_a` is accumulated cell-by-cell on the conjugate grid and inverted
/// exactly within cells. The profile starts at `γ(0) = a` and is a valid
/// upper bound on `‖Pⁿf‖²/Φ(f)` whenever the certificate is.
pub fn gamma_from_beta(cert: &WpiCertificate, n_max: usize) -> Result<ConvergenceProfile> {
    if !matches!(cert.parametrization, Parametrization::Beta) {
        return Err(Error::InvalidCertificate("gamma_from_beta needs a beta certificate".into()));
    }
    let a = cert.a_bound;
    if !cert.rate.vanishes_at_infinity() {
        let floor = cert.rate.eval(1e15).min(a);
        return Err(Error::NonVanishingGamma { floor });
    }
    let ks = k_transform_rate(&cert.rate, a)?;
    gamma_from_kstar(&ks, a, n_max)
}

pub(crate) fn gamma_from_kstar(ks: &KStar, a: f64, n_max: usize) -> Result<ConvergenceProfile> {
    let mut gamma = Vec::with_capacity(n_max + 1);
    match ks {
        KStar::Power { coef, q } => {
            debug_assert!(*q > 1.0);
            let m = q - 1.0;
            for n in 0..=n_max {
                gamma.push((a.powf(-m) + coef * m * n as f64).powf(-1.0 / m));
            }
        }
        KStar::Linear { slope } => {
            for n in 0..=n_max {
                gamma.push(a * (-slope * n as f64).exp());
            }
        }
        KStar::Threshold { at } => {
            return Err(Error::NonVanishingGamma { floor: *at });
        }
        KStar::InstantDecay => {
            gamma.push(a);
            gamma.resize(n_max + 1, 0.0);
        }
        KStar::Grid { v, k } => {
            // cumulative F at the nodes, from F(a) = 0 downwards; a zero
            // conjugate cell makes F infinite below it and the profile
            // stalls there (still an upper bound on the true decay)
            let m = v.len();
            let mut f_node = vec![0.0f64; m];
            for i in (0..m - 1).rev() {
                if k[i] <= 0.0 {
                    f_node[i] = f64::INFINITY;
                } else {
                    f_node[i] = f_node[i + 1] + (v[i + 1] - v[i]) / k[i];
                }
            }
            if !f_node[m - 2].is_finite() {
                return Err(Error::DivergentIntegral(format!(
                    "K* vanishes immediately below a = {:.3e}; F_a is undefined",
                    v[m - 1]
                )));
            }
            for n in 0..=n_max {
                let target = n as f64;
                if target <= 0.0 {
                    gamma.push(a);
                    continue;
                }
                if target >= f_node[0] {
                    gamma.push(v[0]);
                    continue;
                }
                // first node index (from below) with F >= target
                let mut lo = 0usize;
                let mut hi = m - 1;
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if f_node[mid] >= target {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                let i = lo; // F(v[i]) >= target > F(v[i+1])
                let x = v[i + 1] - (target - f_node[i + 1]) * k[i];
                gamma.push(x.clamp(v[i], v[i + 1]));
            }
        }
    }
    // guard against floating-point wobble
    for i in 1..gamma.len() {
        if gamma[i] > gamma[i - 1] {
            gamma[i] = gamma[i - 1];
        }
    }
    Ok(ConvergenceProfile::new(gamma, ProfileOrigin::FromBeta))
}

/// The tractable one-step bound `vₙ = (Id − K*)∘ⁿ(v₀)`, clamped at zero.
pub fn iterate_bound(
    cert: &WpiCertificate,
    v0: f64,
    n_max: usize,
) -> Result<ConvergenceProfile> {
    if !(v0 > 0.0 && v0 <= cert.a_bound) {
        return Err(Error::DomainError(format!(
            "v0 must lie in (0, {}], got {v0}",
            cert.a_bound
        )));
    }
    let ks = k_transform_rate(&cert.rate, cert.a_bound)?;
    let mut seq = Vec::with_capacity(n_max + 1);
    let mut v = v0;
    seq.push(v);
    for _ in 0..n_max {
        let step = ks.eval(v);
        v = if step.is_infinite() { 0.0 } else { (v - step).max(0.0) };
        seq.push(v);
    }
    Ok(ConvergenceProfile::new(seq, ProfileOrigin::FromIterates))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaFromGammaMode {
    /// Read `K*` off one-step differences of the profile.
    IterateForm,
    /// `K* = Id − F⁻¹(1 + F(·))` with `F` the interpolated inverse profile.
    FForm,
    /// Same construction, for exact decay sequences of reversible kernels
    /// (whose shape automatically satisfies the F-form prerequisites).
    ReversibleDecreasing,
}

/// Converse direction: recover a conjugate `K*` from an observed decay
/// profile, so that `E(P*P, f) >= Φ(f)·K*(‖f‖²/Φ(f))` is implied.
pub fn beta_from_gamma(profile: &ConvergenceProfile, mode: BetaFromGammaMode) -> Result<KStar> {
    let g = &profile.gamma;
    if g.len() < 3 {
        return Err(Error::DomainError("need at least three profile points".into()));
    }
    if g.iter().any(|x| *x <= 0.0 || !x.is_finite()) {
        return Err(Error::ShapeViolation("profile must be strictly positive".into()));
    }
    for w in g.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::ShapeViolation("profile must be strictly decreasing".into()));
        }
    }
    match mode {
        BetaFromGammaMode::IterateForm => {
            let n = g.len() - 1;
            let mut v = Vec::with_capacity(n);
            let mut k = Vec::with_capacity(n);
            for i in (0..n).rev() {
                v.push(g[i]);
                k.push(g[i] - g[i + 1]);
            }
            // one-step gains must grow with the level for a convex K*
            let scale = k.last().copied().unwrap_or(1.0).max(1e-300);
            for w in k.windows(2) {
                if w[1] < w[0] - 1e-9 * scale {
                    return Err(Error::ShapeViolation(
                        "profile differences do not shrink along the decay".into(),
                    ));
                }
            }
            let k = lower_convex_resample(&v, &k);
            Ok(KStar::Grid { v, k })
        }
        BetaFromGammaMode::FForm | BetaFromGammaMode::ReversibleDecreasing => {
            check_fform_prereqs(g)?;
            // keep 1 + F(v) inside the observed profile
            let lo = g[g.len() - 2];
            let hi = g[0];
            let vs = num::log_grid(lo, hi, 512);
            let mut ks = Vec::with_capacity(vs.len());
            for &x in &vs {
                let y = 1.0 + interp_f(g, x);
                let next = interp_f_inv(g, y);
                ks.push((x - next).max(0.0));
            }
            for i in 1..ks.len() {
                if ks[i] < ks[i - 1] {
                    ks[i] = ks[i - 1];
                }
            }
            let ks = lower_convex_resample(&vs, &ks);
            Ok(KStar::Grid { v: vs, k: ks })
        }
    }
}

/// Resample node values onto their lower convex hull anchored at the
/// origin. Convexity, monotonicity and `K*(0) = 0` then hold by
/// construction, and pointwise the hull never exceeds the input, which is
/// the sound direction for every derived bound.
fn lower_convex_resample(v: &[f64], k: &[f64]) -> Vec<f64> {
    let mut hull: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for (&x, &y) in v.iter().zip(k) {
        let p = (x, y);
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(v.len());
    let mut seg = 0usize;
    for &x in v {
        while seg + 1 < hull.len() - 1 && hull[seg + 1].0 < x {
            seg += 1;
        }
        let (x0, y0) = hull[seg];
        let (x1, y1) = hull[seg + 1];
        let t = if x1 > x0 { ((x - x0) / (x1 - x0)).clamp(0.0, 1.0) } else { 1.0 };
        out.push((y0 + t * (y1 - y0)).max(0.0));
    }
    out
}

/// `F(x)` with `F(γ(n)) = n`, log-linear between profile nodes.
fn interp_f(g: &[f64], x: f64) -> f64 {
    if x >= g[0] {
        return 0.0;
    }
    let last = *g.last().unwrap();
    if x <= last {
        return (g.len() - 1) as f64;
    }
    // g descending: find n with g[n+1] <= x <= g[n]
    let mut lo = 0usize;
    let mut hi = g.len() - 1;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if g[mid] >= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let frac = (g[lo].ln() - x.ln()) / (g[lo].ln() - g[lo + 1].ln());
    lo as f64 + frac
}

fn interp_f_inv(g: &[f64], y: f64) -> f64 {
    if y <= 0.0 {
        return g[0];
    }
    let n = g.len() - 1;
    if y >= n as f64 {
        return g[n];
    }
    let i = y.floor() as usize;
    let frac = y - i as f64;
    (g[i].ln() * (1.0 - frac) + g[i + 1].ln() * frac).exp()
}

fn check_fform_prereqs(g: &[f64]) -> Result<()> {
    // F⁻¹ (the profile) must be convex, and log(−DF⁻¹) convex.
    let scale = g[0];
    for w in g.windows(3) {
        if w[1] - w[2] > w[0] - w[1] + 1e-9 * scale {
            return Err(Error::ShapeViolation("profile is not convex".into()));
        }
    }
    for w in g.windows(4) {
        let d0 = w[0] - w[1];
        let d1 = w[1] - w[2];
        let d2 = w[2] - w[3];
        if d1 * d1 > d0 * d2 * (1.0 + 1e-7) + 1e-300 {
            return Err(Error::ShapeViolation(
                "profile differences are not log-convex".into(),
            ));
        }
    }
    Ok(())
}

/// Lᵖ extension of an oscillation profile:
/// `γ_p(n) = 2^(4+4/p) · γ(n)^(1−2/p)` for `p > 2`.
pub fn gamma_p_extend(profile: &ConvergenceProfile, p: f64) -> Result<ConvergenceProfile> {
    if p <= 2.0 {
        return Err(Error::DomainError(format!("p must exceed 2, got {p}")));
    }
    let factor = 2f64.powf(4.0 + 4.0 / p);
    let expo = 1.0 - 2.0 / p;
    let gamma = profile.gamma.iter().map(|g| factor * g.powf(expo)).collect();
    Ok(ConvergenceProfile::new(gamma, profile.origin))
}

/// Asymptotic-variance bound `4·Φ(f)·B(v)` with `B(v) = ∫₀^v w/K*(w) dw`,
/// for `v = ‖f‖²/Φ(f)`.
///
/// The theorem needs `w ↦ w − K*(w)` nondecreasing along the iterate orbit,
/// which starts at `v`; the check therefore runs on `(0, v]`. A divergent
/// `B` is reported as the `+∞` sentinel rather than an error.
pub fn asym_var_bound(cert: &WpiCertificate, v: f64, phi_f: f64) -> Result<f64> {
    if !matches!(cert.parametrization, Parametrization::Beta) {
        return Err(Error::InvalidCertificate("asym_var_bound needs a beta certificate".into()));
    }
    if !(v > 0.0 && v <= cert.a_bound) {
        return Err(Error::DomainError(format!(
            "v must lie in (0, {}], got {v}",
            cert.a_bound
        )));
    }
    if phi_f <= 0.0 {
        return Err(Error::DomainError("phi_f must be positive".into()));
    }
    let ks = k_transform_rate(&cert.rate, cert.a_bound)?;
    // Id − K* nondecreasing on (0, v]
    let grid = num::log_grid(v * 1e-10, v, 96);
    let mut prev = f64::NEG_INFINITY;
    for &w in &grid {
        let s = w - ks.eval(w);
        if s < prev - 1e-12 * v {
            return Err(Error::AssumptionViolated(format!(
                "w - K*(w) decreases near w={w:.6e}"
            )));
        }
        prev = s;
    }
    Ok(4.0 * phi_f * b_integral(&ks, v))
}

fn b_integral(ks: &KStar, v: f64) -> f64 {
    match ks {
        KStar::Power { coef, q } => {
            if *q >= 2.0 {
                f64::INFINITY
            } else {
                v.powf(2.0 - q) / (coef * (2.0 - q))
            }
        }
        KStar::Linear { slope } => v / slope,
        KStar::Threshold { .. } => f64::INFINITY,
        KStar::InstantDecay => 0.0,
        KStar::Grid { v: nodes, k } => {
            let mut total = 0.0;
            // Below the first node the integrand w/K*(w) is extrapolated
            // as a power of w from its growth across the low nodes:
            // i(w) ≈ i(v₀)(v₀/w)^g integrates to i(v₀)·v₀/(1−g), and
            // g >= 1 means the integral diverges at zero.
            if k[0] <= 0.0 {
                return f64::INFINITY;
            }
            let i0 = nodes[0] / k[0];
            let probe = nodes.len().min(200) - 1;
            let ip = nodes[probe] / k[probe].max(1e-300);
            let g = (i0 / ip).max(1e-12).ln() / (nodes[probe] / nodes[0]).ln();
            if g >= 0.95 {
                return f64::INFINITY;
            }
            total += i0 * nodes[0] / (1.0 - g.max(0.0));
            for i in 0..nodes.len() - 1 {
                if nodes[i] >= v {
                    break;
                }
                let hi = nodes[i + 1].min(v);
                if k[i] <= 0.0 {
                    return f64::INFINITY;
                }
                total += (hi * hi - nodes[i] * nodes[i]) / (2.0 * k[i]);
            }
            total
        }
    }
}

/// Normalized spectral-mass bound near ±1:
/// `ν_f(λ² > e^(−δ))/Φ(f) <= min_n γ(n)·e^(δn)`.
pub fn spectral_mass_bound(profile: &ConvergenceProfile, delta: f64) -> f64 {
    assert!(delta > 0.0, "delta must be positive");
    let mut best = f64::INFINITY;
    for n in 1..=profile.n_max() {
        let cand = profile.gamma[n] * (delta * n as f64).exp();
        if cand < best {
            best = cand;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointwiseOrder {
    FirstBelow,
    SecondBelow,
    Equal,
    Crossing,
}

/// Comparison report for two certificates sharing a sieve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderReport {
    pub beta_order: PointwiseOrder,
    pub gamma_order: PointwiseOrder,
    /// Whether `β₂ >= β₁ everywhere ⟹ γ₂ >= γ₁ everywhere` was confirmed
    /// (vacuously true when the βs cross).
    pub implication_holds: bool,
    pub gamma1: ConvergenceProfile,
    pub gamma2: ConvergenceProfile,
}

fn classify(first: &[f64], second: &[f64], tol: f64) -> PointwiseOrder {
    let mut first_le = true;
    let mut second_le = true;
    for (a, b) in first.iter().zip(second) {
        if *a > *b + tol {
            first_le = false;
        }
        if *b > *a + tol {
            second_le = false;
        }
    }
    match (first_le, second_le) {
        (true, true) => PointwiseOrder::Equal,
        (true, false) => PointwiseOrder::FirstBelow,
        (false, true) => PointwiseOrder::SecondBelow,
        (false, false) => PointwiseOrder::Crossing,
    }
}

/// Pointwise β comparison on a log grid plus the induced γ comparison;
/// the Peskun-style implication `β ordered ⟹ γ ordered` is asserted
/// whenever the β ordering holds on the whole grid.
pub fn order_rates(
    cert1: &WpiCertificate,
    cert2: &WpiCertificate,
    n_max: usize,
) -> Result<OrderReport> {
    if !cert1.sieve.same_as(&cert2.sieve) {
        return Err(Error::IncomparableSieves(cert1.sieve.label(), cert2.sieve.label()));
    }
    if (cert1.a_bound - cert2.a_bound).abs() > 1e-12 {
        return Err(Error::DomainError("certificates carry different a_bounds".into()));
    }
    let b1 = to_beta(cert1)?;
    let b2 = to_beta(cert2)?;
    let grid = num::log_grid(1e-6, 1e8, 256);
    let v1: Vec<f64> = grid.iter().map(|s| b1.eval_beta(*s)).collect();
    let v2: Vec<f64> = grid.iter().map(|s| b2.eval_beta(*s)).collect();
    let beta_order = classify(&v1, &v2, 1e-12);

    let gamma1 = gamma_from_beta(&b1, n_max)?;
    let gamma2 = gamma_from_beta(&b2, n_max)?;
    let gamma_order = classify(&gamma1.gamma, &gamma2.gamma, 1e-9);

    let implication_holds = match beta_order {
        PointwiseOrder::SecondBelow | PointwiseOrder::Equal => {
            // β₁ >= β₂ pointwise must force γ₁ >= γ₂
            gamma1
                .gamma
                .iter()
                .zip(&gamma2.gamma)
                .all(|(g1, g2)| *g1 >= *g2 - 1e-9)
        }
        PointwiseOrder::FirstBelow => gamma1
            .gamma
            .iter()
            .zip(&gamma2.gamma)
            .all(|(g1, g2)| *g2 >= *g1 - 1e-9),
        PointwiseOrder::Crossing => true,
    };
    Ok(OrderReport { beta_order, gamma_order, implication_holds, gamma1, gamma2 })
}

fn to_beta(cert: &WpiCertificate) -> Result<WpiCertificate> {
    match cert.parametrization {
        Parametrization::Beta => Ok(cert.clone()),
        Parametrization::Alpha => crate::rate::certificate::alpha_to_beta(cert),
    }
}

/// Infimal convolution used to combine β₊ and β₋ rates for a squared
/// kernel: `β(s) = inf { s₁·β₊(s₂) + β₋(s₁) : s₁·s₂ = s }`. The scan
/// resolution over `s₁` is a caller-visible tuning parameter.
pub fn infimal_convolution(
    beta_plus: &MonotoneRate,
    beta_minus: &MonotoneRate,
    s_grid: &[f64],
    scan_points: usize,
) -> MonotoneRate {
    let mut values = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let mut best = f64::INFINITY;
        for &s1 in &num::log_grid(1e-8, 1e8, scan_points.max(8)) {
            let cand = s1 * beta_plus.eval(s / s1) + beta_minus.eval(s1);
            if cand < best {
                best = cand;
            }
        }
        values.push(best);
    }
    // pointwise infima of products of decreasing rates can wobble at grid
    // resolution; enforce monotonicity before wrapping
    let mut v = values;
    for i in 1..v.len() {
        if v[i] > v[i - 1] {
            v[i] = v[i - 1];
        }
    }
    MonotoneRate::tabulated(s_grid.to_vec(), v, Interp::Step)
}
