//! WPI certificates and convergence profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::monotone::{generalized_inverse, MonotoneRate};

/// Default sieve bound for the squared oscillation: `var(f) <= ||f||²_osc`.
pub const OSC_SQ_A_BOUND: f64 = 1.0;

/// The sieve functional grading the function class of a WPI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sieve {
    /// Squared oscillation `||·||²_osc`.
    OscSq,
    /// Squared p-norm for `p > 2`.
    PNorm { p: f64 },
    /// User-defined sieve identified by name.
    Custom { tag: String },
}

impl Sieve {
    pub fn same_as(&self, other: &Sieve) -> bool {
        self == other
    }

    pub fn label(&self) -> String {
        match self {
            Sieve::OscSq => "osc_sq".into(),
            Sieve::PNorm { p } => format!("p_norm({p})"),
            Sieve::Custom { tag } => format!("custom({tag})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parametrization {
    Alpha,
    Beta,
}

/// A weak Poincaré inequality certificate for a named kernel: a sieve tag
/// plus a rate in either the α- or β-parametrization, with an a-priori
/// upper bound `a_bound >= 𝔞` on the sieve constant.
///
/// Evaluation applies the sound clamping conventions: an α-rate evaluates
/// to `0` on `r >= a_bound` (the inequality there is the trivial
/// `||f||² <= a·Φ(f)`), and a β-rate evaluates to `min(rate, a_bound)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WpiCertificate {
    pub sieve: Sieve,
    pub parametrization: Parametrization,
    pub rate: MonotoneRate,
    pub a_bound: f64,
}

impl WpiCertificate {
    pub fn alpha(sieve: Sieve, rate: MonotoneRate, a_bound: f64) -> Result<Self> {
        Self::build(sieve, Parametrization::Alpha, rate, a_bound)
    }

    pub fn beta(sieve: Sieve, rate: MonotoneRate, a_bound: f64) -> Result<Self> {
        Self::build(sieve, Parametrization::Beta, rate, a_bound)
    }

    fn build(
        sieve: Sieve,
        parametrization: Parametrization,
        rate: MonotoneRate,
        a_bound: f64,
    ) -> Result<Self> {
        if !(a_bound > 0.0 && a_bound.is_finite()) {
            return Err(Error::InvalidCertificate(format!(
                "a_bound must be positive and finite, got {a_bound}"
            )));
        }
        rate.validate()
            .map_err(|e| Error::InvalidCertificate(e.to_string()))?;
        Ok(WpiCertificate { sieve, parametrization, rate, a_bound })
    }

    /// α(r), zero on `r >= a_bound`.
    pub fn eval_alpha(&self, r: f64) -> f64 {
        assert!(matches!(self.parametrization, Parametrization::Alpha));
        if r >= self.a_bound {
            0.0
        } else {
            self.rate.eval(r)
        }
    }

    /// β(s), capped at `a_bound`.
    pub fn eval_beta(&self, s: f64) -> f64 {
        assert!(matches!(self.parametrization, Parametrization::Beta));
        self.rate.eval(s).min(self.a_bound)
    }

    /// Effective supremum of the β-rate (after capping).
    pub fn beta_top(&self) -> f64 {
        self.rate.top().min(self.a_bound)
    }
}

/// α-form to β-form: `β := α⁻` with the same sieve and bound.
pub fn alpha_to_beta(cert: &WpiCertificate) -> Result<WpiCertificate> {
    if !matches!(cert.parametrization, Parametrization::Alpha) {
        return Err(Error::InvalidCertificate("expected an alpha certificate".into()));
    }
    let rate = generalized_inverse(&cert.rate);
    WpiCertificate::beta(cert.sieve.clone(), rate, cert.a_bound)
}

/// β-form to α-form: `α := β⁻`, vanishing beyond `a_bound` by convention.
pub fn beta_to_alpha(cert: &WpiCertificate) -> Result<WpiCertificate> {
    if !matches!(cert.parametrization, Parametrization::Beta) {
        return Err(Error::InvalidCertificate("expected a beta certificate".into()));
    }
    let rate = generalized_inverse(&cert.rate);
    WpiCertificate::alpha(cert.sieve.clone(), rate, cert.a_bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileOrigin {
    FromBeta,
    FromIterates,
    Empirical,
}

/// A convergence profile: `γ(n)` for `n = 0..=n_max`, nonincreasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceProfile {
    pub gamma: Vec<f64>,
    pub origin: ProfileOrigin,
}

impl ConvergenceProfile {
    pub fn new(gamma: Vec<f64>, origin: ProfileOrigin) -> Self {
        debug_assert!(crate::num::is_nonincreasing(&gamma, 1e-12));
        ConvergenceProfile { gamma, origin }
    }

    pub fn n_max(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn value(&self, n: usize) -> f64 {
        self.gamma[n]
    }

    /// Log-log slope fitted over `n` in `[n_lo, n_hi]`.
    pub fn loglog_slope(&self, n_lo: usize, n_hi: usize) -> f64 {
        let ns: Vec<f64> = (n_lo..=n_hi.min(self.n_max())).map(|n| n as f64).collect();
        let gs: Vec<f64> = (n_lo..=n_hi.min(self.n_max())).map(|n| self.gamma[n]).collect();
        crate::num::loglog_slope(&ns, &gs)
    }

    /// Whether the last computed value certifies `γ -> 0` below `threshold`.
    pub fn vanishing_certified(&self, threshold: f64) -> bool {
        *self.gamma.last().unwrap() < threshold
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::Interp;

    #[test]
    fn spi_limit_alpha_zero_maps_to_zero_beta() {
        // α ≡ 0 with 𝔞 = 1: the inverse is 0 for every s > 0
        let cert = WpiCertificate::alpha(Sieve::OscSq, MonotoneRate::constant(0.0), 1.0).unwrap();
        let beta = alpha_to_beta(&cert).unwrap();
        for &s in &[1e-6, 1.0, 1e6] {
            assert_eq!(beta.eval_beta(s), 0.0);
        }
    }

    #[test]
    fn reciprocal_beta_converts_to_clipped_alpha() {
        // β(s) = 1/s, a = 1: α(r) = 1/r clipped to 0 on r >= 1
        let cert = WpiCertificate::beta(Sieve::OscSq, MonotoneRate::power_law(1.0, 1.0), 1.0).unwrap();
        let alpha = beta_to_alpha(&cert).unwrap();
        for &r in &[0.1, 0.5, 0.9] {
            assert!((alpha.eval_alpha(r) - 1.0 / r).abs() < 1e-12);
        }
        assert_eq!(alpha.eval_alpha(1.0), 0.0);
        assert_eq!(alpha.eval_alpha(3.0), 0.0);
    }

    #[test]
    fn roundtrip_on_power_law_family() {
        for &(c, p) in &[(1.0, 1.0), (2.0, 0.5), (0.3, 3.0)] {
            let beta = WpiCertificate::beta(Sieve::OscSq, MonotoneRate::power_law(c, p), 1.0).unwrap();
            let back = alpha_to_beta(&beta_to_alpha(&beta).unwrap()).unwrap();
            for &s in &[0.2, 1.0, 11.0, 140.0] {
                let want = beta.eval_beta(s);
                let got = back.eval_beta(s);
                assert!((want - got).abs() <= 1e-10 * want.max(1.0), "s={s}");
            }
        }
    }

    #[test]
    fn mismatched_parametrization_is_rejected() {
        let cert = WpiCertificate::beta(Sieve::OscSq, MonotoneRate::power_law(1.0, 1.0), 1.0).unwrap();
        assert!(alpha_to_beta(&cert).is_err());
    }

    #[test]
    fn invalid_rate_is_rejected() {
        // increasing "rate"
        let bad = MonotoneRate::Tabulated {
            grid: vec![1.0, 2.0],
            values: vec![1.0, 3.0],
            interp: Interp::Step,
        };
        assert!(WpiCertificate::beta(Sieve::OscSq, bad, 1.0).is_err());
        assert!(WpiCertificate::beta(Sieve::OscSq, MonotoneRate::constant(1.0), -1.0).is_err());
    }
}
