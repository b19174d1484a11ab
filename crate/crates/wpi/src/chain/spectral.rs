//! Spectral measures of observables under reversible kernels, the exact
//! asymptotic variance, and the optimal-sieve evaluation Φ_β.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num;
use crate::rate::MonotoneRate;

use super::kernel::{FiniteKernel, Observable};

/// Spectral measure `ν_f` of an observable: atoms `(λᵢ, ν_f(λᵢ))` with
/// `<Pⁿf, f> = Σ λᵢⁿ ν_f(λᵢ)` and total mass `‖f‖²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub eigenvalues: Vec<f64>,
    pub masses: Vec<f64>,
}

impl SpectralMeasure {
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `Σ λⁿ ν(λ)`.
    pub fn moment(&self, n: u32) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.masses)
            .map(|(l, m)| l.powi(n as i32) * m)
            .sum()
    }

    /// Mass on `{λ : λ² > threshold}`.
    pub fn mass_above_sq(&self, threshold: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.masses)
            .filter(|(l, _)| *l * *l > threshold)
            .map(|(_, m)| m)
            .sum()
    }
}

impl FiniteKernel {
    /// Spectral measure of `f` (as given, not centered) under a reversible
    /// kernel, from the eigendecomposition of `D^{1/2} P D^{−1/2}`.
    pub fn spectral_measure(&self, f: &[f64]) -> Result<SpectralMeasure> {
        let (vals, vecs) = self.symmetrized_eigen()?;
        let n = self.n();
        // coordinates of D^{1/2} f in the orthonormal eigenbasis
        let root_mu_f: Vec<f64> = (0..n).map(|x| self.mu()[x].max(0.0).sqrt() * f[x]).collect();
        let mut masses = Vec::with_capacity(n);
        for i in 0..n {
            let dot: f64 = (0..n).map(|x| vecs[(x, i)] * root_mu_f[x]).sum();
            masses.push(dot * dot);
        }
        Ok(SpectralMeasure { eigenvalues: vals, masses })
    }

    /// Exact asymptotic variance `var(P, f) = Σ ν_f(λ)·(1+λ)/(1−λ)` of the
    /// centered observable; errors with `MassAtOne` if the centered
    /// function still loads on the unit eigenvalue (a reducibility signal).
    pub fn exact_asymptotic_variance(&self, f: &Observable) -> Result<f64> {
        let centered = f.centered();
        let measure = self.spectral_measure(&centered)?;
        let norm = self.norm_sq(&centered);
        let mut var = 0.0;
        for (l, m) in measure.eigenvalues.iter().zip(&measure.masses) {
            if *l > 1.0 - 1e-10 {
                if *m > 1e-8 * norm.max(1e-30) {
                    return Err(Error::MassAtOne(*m));
                }
                continue;
            }
            var += m * (1.0 + l) / (1.0 - l);
        }
        Ok(var)
    }
}

/// Finite-horizon evaluation of the smallest sieve compatible with a given
/// β: `Φ*_β(f) = sup_{n <= n_max} Φ_β(Pⁿf)` where
/// `Φ_β(g) = ‖g‖² · sup_s (1 − s·δ(g))/β(s)` and
/// `δ(g) = E(P*P, g)/‖g‖²`.
///
/// The true supremum ranges over all `n`; the returned value is the
/// horizon-limited lower bound for it.
pub fn phi_beta_eval(
    kernel: &FiniteKernel,
    f: &Observable,
    beta: &MonotoneRate,
    n_max: usize,
) -> Result<f64> {
    let centered = f.centered();
    let norm = kernel.norm_sq(&centered);
    if norm <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    let measure = kernel.spectral_measure(&centered)?;
    Ok(phi_beta_profile(&measure, beta, n_max)?
        .into_iter()
        .fold(0.0f64, f64::max))
}

/// The sequence `n ↦ Φ_β(Pⁿf)` computed from the spectral measure alone:
/// `‖Pⁿf‖² = m_{2n}` and `δ(Pⁿf) = 1 − m_{2n+2}/m_{2n}` in terms of the
/// even moments `m_k = Σ λᵏ ν_f(λ)`.
pub fn phi_beta_profile(
    measure: &SpectralMeasure,
    beta: &MonotoneRate,
    n_max: usize,
) -> Result<Vec<f64>> {
    if measure.total_mass() <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let m2n = measure.moment(2 * n as u32);
        if m2n <= 1e-280 {
            out.push(0.0);
            continue;
        }
        let m2n2 = measure.moment(2 * n as u32 + 2);
        let delta = (1.0 - m2n2 / m2n).max(0.0);
        out.push(m2n * sieve_factor(beta, delta));
    }
    Ok(out)
}

/// `sup_s (1 − s·δ)/β(s)`, in closed form for a power law
/// (`α^α/(α+1)^(α+1) · δ^(−α) / c` for `β = c·s^(−α)`) and by a log-grid
/// scan with golden refinement otherwise.
fn sieve_factor(beta: &MonotoneRate, delta: f64) -> f64 {
    if delta <= 0.0 {
        // the spectral atom sits at ±1 and the sup diverges
        return f64::INFINITY;
    }
    if let MonotoneRate::PowerLaw { c, p } = beta {
        let a = *p;
        return a.powf(a) / (a + 1.0).powf(a + 1.0) * delta.powf(-a) / c;
    }
    let g = |s: f64| (1.0 - s * delta).max(0.0) / beta.eval(s).max(1e-300);
    let grid = num::log_grid(1e-8, 1.0 / delta, 2048);
    let mut best = 0.0f64;
    let mut best_i = 0usize;
    for (i, &s) in grid.iter().enumerate() {
        let v = g(s);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = grid[best_i.saturating_sub(1)];
    let hi = grid[(best_i + 1).min(grid.len() - 1)];
    let (_, refined) = num::golden_max(|ls: f64| g(ls.exp()), lo.ln(), hi.ln(), 50);
    best.max(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn moments_reproduce_powers_of_p() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let k = FiniteKernel::random_reversible(6, &mut rng);
        let f = k.observable(vec![1.0, -0.5, 2.0, 0.0, 0.3, -1.2]);
        let centered = f.centered();
        let measure = k.spectral_measure(&centered).unwrap();
        // <Pⁿ f, f> against the matrix iteration, n <= 50
        let mut g = centered.clone();
        for n in 0..=50u32 {
            let inner: f64 = g
                .iter()
                .zip(&centered)
                .zip(k.mu())
                .map(|((a, b), m)| a * b * m)
                .sum();
            assert!(
                (inner - measure.moment(n)).abs() < 1e-9,
                "moment mismatch at n={n}"
            );
            g = k.apply(&g);
        }
        assert!((measure.total_mass() - k.norm_sq(&centered)).abs() < 1e-10);
    }

    #[test]
    fn eigenfunction_gives_single_atom() {
        // two-state symmetric chain: eigenvalues 1 and 1−2p
        let p = 0.3;
        let k = FiniteKernel::two_state(p, p).unwrap();
        let f = k.observable(vec![1.0, -1.0]);
        let m = k.spectral_measure(&f.centered()).unwrap();
        let mut atoms: Vec<(f64, f64)> = m
            .eigenvalues
            .iter()
            .zip(&m.masses)
            .filter(|(_, mass)| **mass > 1e-12)
            .map(|(l, mass)| (*l, *mass))
            .collect();
        assert_eq!(atoms.len(), 1);
        let (lambda, mass) = atoms.pop().unwrap();
        assert!((lambda - (1.0 - 2.0 * p)).abs() < 1e-12);
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_state_asymptotic_variance_closed_form() {
        // eigenvalue 1−2p with full mass: var = ‖f‖²(2−2p)/(2p)
        let p = 0.3;
        let k = FiniteKernel::two_state(p, p).unwrap();
        let f = k.observable(vec![1.0, 0.0]);
        let var = k.exact_asymptotic_variance(&f).unwrap();
        let norm = k.norm_sq(&f.centered());
        let want = norm * (2.0 - 2.0 * p) / (2.0 * p);
        assert!((var - want).abs() < 1e-12);
    }

    #[test]
    fn mass_at_one_flags_reducibility() {
        let rows = vec![
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.0, 0.0, 0.5, 0.5],
        ];
        let k = FiniteKernel::with_stationary(rows, vec![0.25; 4]).unwrap();
        let f = k.observable(vec![1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            k.exact_asymptotic_variance(&f),
            Err(Error::MassAtOne(_))
        ));
    }

    #[test]
    fn phi_beta_closed_form_alpha_one() {
        // α = 1: Φ_β(f) = ‖f‖²/(4δ)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let k = FiniteKernel::random_reversible(5, &mut rng);
        let f = k.observable(vec![0.2, -1.0, 0.4, 1.3, -0.6]);
        let beta = MonotoneRate::power_law(1.0, 1.0);
        let centered = f.centered();
        let norm = k.norm_sq(&centered);
        let pp = k.multiplicative_reversibilization().unwrap();
        let delta = pp.dirichlet_form(&centered) / norm;
        let phi0 = phi_beta_profile(&k.spectral_measure(&centered).unwrap(), &beta, 0)
            .unwrap()[0];
        assert!((phi0 - norm / (4.0 * delta)).abs() < 1e-9 * phi0);
        let sup = phi_beta_eval(&k, &f, &beta, 10).unwrap();
        assert!(sup >= phi0 - 1e-12);
    }

    #[test]
    fn eigenfunction_of_p_squared_attains_sup_at_zero() {
        let p = 0.35;
        let k = FiniteKernel::two_state(p, p).unwrap();
        let f = k.observable(vec![1.0, -1.0]);
        let beta = MonotoneRate::power_law(1.0, 1.0);
        let seq = phi_beta_profile(
            &k.spectral_measure(&f.centered()).unwrap(),
            &beta,
            8,
        )
        .unwrap();
        for v in &seq[1..] {
            assert!(*v <= seq[0] + 1e-12);
        }
    }

    #[test]
    fn moment_ratio_of_polynomial_density_measure() {
        // discretized ν(dλ) ∝ λ^{a−1} on [0,1]: even-moment ratio is
        // (a+2n)/(a+2+2n), and the Φ_β sequence eventually grows when the
        // sieve exponent exceeds the decay exponent
        let a = 1.0f64;
        let atoms = 200_000usize;
        let mut eigenvalues = Vec::with_capacity(atoms);
        let mut masses = Vec::with_capacity(atoms);
        for i in 0..atoms {
            let lo = i as f64 / atoms as f64;
            let hi = (i + 1) as f64 / atoms as f64;
            eigenvalues.push(0.5 * (lo + hi));
            masses.push(hi.powf(a) - lo.powf(a)); // integral of a·λ^{a−1}
        }
        let measure = SpectralMeasure { eigenvalues, masses };
        for n in 0..10u32 {
            let ratio = measure.moment(2 * n + 2) / measure.moment(2 * n);
            let want = (a + 2.0 * n as f64) / (a + 2.0 + 2.0 * n as f64);
            assert!((ratio - want).abs() < 1e-4, "n={n}: {ratio} vs {want}");
        }
        let beta = MonotoneRate::power_law(1.0, 2.0);
        let seq = phi_beta_profile(&measure, &beta, 12).unwrap();
        for n in 2..12 {
            assert!(seq[n + 1] > seq[n], "expected growth at n={n}");
        }
    }
}
