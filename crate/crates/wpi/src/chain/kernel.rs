//! Row-stochastic kernels over labeled finite state spaces.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::{Interp, MonotoneRate, Sieve, WpiCertificate, OSC_SQ_A_BOUND};

/// States with stationary mass below this are treated as null.
pub const MASS_TOL: f64 = 1e-15;

const ROW_SUM_TOL: f64 = 1e-12;
const INVARIANCE_TOL: f64 = 1e-10;
const REVERSIBILITY_TOL: f64 = 1e-10;

/// A row-stochastic matrix over states `0..n-1` with its stationary
/// distribution, either computed by least squares or supplied and checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteKernel {
    n: usize,
    /// Row-major transition probabilities.
    p: Vec<f64>,
    mu: Vec<f64>,
}

impl FiniteKernel {
    /// Build from rows, computing the stationary distribution.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let p = flatten_and_check(rows)?;
        let mu = stationary(n, &p)?;
        let k = FiniteKernel { n, p, mu };
        k.check_invariance()?;
        Ok(k)
    }

    /// Build from rows with a supplied stationary distribution.
    pub fn with_stationary(rows: Vec<Vec<f64>>, mu: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if mu.len() != n {
            return Err(Error::InvalidKernel("mu length mismatch".into()));
        }
        let p = flatten_and_check(rows)?;
        let s: f64 = mu.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidKernel(format!("mu sums to {s}")));
        }
        if mu.iter().any(|m| *m < -ROW_SUM_TOL) {
            return Err(Error::InvalidKernel("mu has negative entries".into()));
        }
        let k = FiniteKernel { n, p, mu };
        k.check_invariance()?;
        Ok(k)
    }

    fn check_invariance(&self) -> Result<()> {
        let mut worst = 0.0f64;
        for y in 0..self.n {
            let mut acc = 0.0;
            for x in 0..self.n {
                acc += self.mu[x] * self.at(x, y);
            }
            worst = worst.max((acc - self.mu[y]).abs());
        }
        if worst > INVARIANCE_TOL {
            return Err(Error::InvalidKernel(format!(
                "mu is not invariant (residual {worst:.3e})"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.n + y]
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|x| self.p[x * self.n..(x + 1) * self.n].to_vec())
            .collect()
    }

    /// The independent kernel Π with rows equal to `mu`.
    pub fn independent(mu: Vec<f64>) -> Result<Self> {
        let rows = vec![mu.clone(); mu.len()];
        Self::with_stationary(rows, mu)
    }

    /// Two-state chain with `P(0,1) = p` and `P(1,0) = q`.
    pub fn two_state(p: f64, q: f64) -> Result<Self> {
        Self::from_rows(vec![vec![1.0 - p, p], vec![q, 1.0 - q]])
    }

    /// Deterministic cycle on `n` states.
    pub fn cycle(n: usize) -> Result<Self> {
        let mut rows = vec![vec![0.0; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[(i + 1) % n] = 1.0;
        }
        Self::with_stationary(rows, vec![1.0 / n as f64; n])
    }

    /// Random reversible chain from symmetric positive weights; weights are
    /// drawn in `[0.1, 1.1)` so the chain is irreducible with conductance
    /// bounded away from zero.
    pub fn random_reversible(n: usize, rng: &mut impl rand::Rng) -> Self {
        let mut w = vec![0.0f64; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(0.1..1.1);
                w[i * n + j] = v;
                w[j * n + i] = v;
            }
        }
        let row_sums: Vec<f64> = (0..n).map(|i| w[i * n..(i + 1) * n].iter().sum()).collect();
        let total: f64 = row_sums.iter().sum();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| w[i * n + j] / row_sums[i]).collect())
            .collect();
        let mu: Vec<f64> = row_sums.iter().map(|s| s / total).collect();
        Self::with_stationary(rows, mu).expect("construction is reversible by design")
    }

    /// Maximum detailed-balance residual `|mu(x)P(x,y) − mu(y)P(y,x)|`.
    pub fn reversibility_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                worst = worst.max((self.mu[x] * self.at(x, y) - self.mu[y] * self.at(y, x)).abs());
            }
        }
        worst
    }

    pub fn is_reversible(&self) -> bool {
        self.reversibility_residual() <= REVERSIBILITY_TOL
    }

    /// Adjoint kernel `P*(x,y) = mu(y)·P(y,x)/mu(x)`; requires full
    /// stationary support (restrict first otherwise).
    pub fn adjoint(&self) -> Result<Self> {
        for (x, m) in self.mu.iter().enumerate() {
            if *m <= MASS_TOL {
                return Err(Error::ZeroMassState(x));
            }
        }
        let n = self.n;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|x| (0..n).map(|y| self.mu[y] * self.at(y, x) / self.mu[x]).collect())
            .collect();
        Self::with_stationary(rows, self.mu.clone())
    }

    /// Additive reversibilization `S = (P + P*)/2`.
    pub fn additive_reversibilization(&self) -> Result<Self> {
        let adj = self.adjoint()?;
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|x| {
                (0..self.n)
                    .map(|y| 0.5 * (self.at(x, y) + adj.at(x, y)))
                    .collect()
            })
            .collect();
        Self::with_stationary(rows, self.mu.clone())
    }

    /// Lazy kernel `T_ε = ε·Id + (1−ε)·P` for `ε ∈ (0,1)`.
    pub fn lazy(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::DomainError(format!("lazy holding must be in (0,1), got {eps}")));
        }
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|x| {
                (0..self.n)
                    .map(|y| {
                        let id = if x == y { eps } else { 0.0 };
                        id + (1.0 - eps) * self.at(x, y)
                    })
                    .collect()
            })
            .collect();
        Self::with_stationary(rows, self.mu.clone())
    }

    /// Matrix product `self · other`, sharing the stationary distribution.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut rows = vec![vec![0.0; n]; n];
        for (x, row) in rows.iter_mut().enumerate() {
            for k in 0..n {
                let pxk = self.at(x, k);
                if pxk == 0.0 {
                    continue;
                }
                for (y, cell) in row.iter_mut().enumerate() {
                    *cell += pxk * other.at(k, y);
                }
            }
        }
        Self::with_stationary(rows, self.mu.clone())
    }

    /// The multiplicative reversibilization `P*P`.
    pub fn multiplicative_reversibilization(&self) -> Result<Self> {
        self.adjoint()?.compose(self)
    }

    /// `(P*)^k P^k`.
    pub fn adjoint_power_product(&self, k: usize) -> Result<Self> {
        let adj = self.adjoint()?;
        let mut left = identity_rows(self.n);
        let mut right = identity_rows(self.n);
        for _ in 0..k {
            left = matmul(&left, &adj.rows());
            right = matmul(&right, &self.rows());
        }
        Self::with_stationary(matmul(&left, &right), self.mu.clone())
    }

    /// Drop zero-mass states, renormalizing nothing (mass is preserved).
    pub fn support_restrict(&self) -> (Self, Vec<usize>) {
        let keep: Vec<usize> = (0..self.n).filter(|&x| self.mu[x] > MASS_TOL).collect();
        if keep.len() == self.n {
            return (self.clone(), keep);
        }
        let rows: Vec<Vec<f64>> = keep
            .iter()
            .map(|&x| {
                let mut row: Vec<f64> = keep.iter().map(|&y| self.at(x, y)).collect();
                // mass leaking to null states folds into the diagonal
                let leak: f64 = 1.0 - row.iter().sum::<f64>();
                let self_idx = keep.iter().position(|&y| y == x).unwrap();
                row[self_idx] += leak;
                row
            })
            .collect();
        let mu: Vec<f64> = keep.iter().map(|&x| self.mu[x]).collect();
        let total: f64 = mu.iter().sum();
        let mu = mu.into_iter().map(|m| m / total).collect();
        (
            Self::with_stationary(rows, mu).expect("support restriction preserves invariance"),
            keep,
        )
    }

    /// Observable with cached moments against this kernel's `mu`.
    pub fn observable(&self, values: Vec<f64>) -> Observable {
        assert_eq!(values.len(), self.n);
        let mean: f64 = values.iter().zip(&self.mu).map(|(f, m)| f * m).sum();
        let variance: f64 = values
            .iter()
            .zip(&self.mu)
            .map(|(f, m)| m * (f - mean) * (f - mean))
            .sum();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (f, m) in values.iter().zip(&self.mu) {
            if *m > MASS_TOL {
                lo = lo.min(*f);
                hi = hi.max(*f);
            }
        }
        let osc = if hi >= lo { hi - lo } else { 0.0 };
        Observable { values, mean, variance, osc }
    }

    /// Indicator observable of the set `a`.
    pub fn indicator(&self, a: &[usize]) -> Observable {
        let mut v = vec![0.0; self.n];
        for &x in a {
            v[x] = 1.0;
        }
        self.observable(v)
    }

    /// `Pf` as a function on states.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|x| (0..self.n).map(|y| self.at(x, y) * f[y]).sum())
            .collect()
    }

    /// `‖f‖²_μ`.
    pub fn norm_sq(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.mu).map(|(v, m)| m * v * v).sum()
    }

    /// Dirichlet form `E(P,f) = <(Id−P)f, f>_μ`, via the energy identity
    /// `½·Σ μ(x)P(x,y)(f(x)−f(y))²` valid for any μ-invariant kernel.
    pub fn dirichlet_form(&self, f: &[f64]) -> f64 {
        let mut acc = 0.0;
        for x in 0..self.n {
            let mx = self.mu[x];
            if mx <= MASS_TOL {
                continue;
            }
            for y in 0..self.n {
                let p = self.at(x, y);
                if p > 0.0 {
                    let d = f[x] - f[y];
                    acc += mx * p * d * d;
                }
            }
        }
        0.5 * acc
    }

    /// Exact `‖Pⁿ f̄‖²` for `n = 0..=n_max`, with `f̄ = f − μ(f)`.
    ///
    /// The iterate is re-centered each step: `P` preserves centering
    /// exactly, but rounding grows a constant component that would floor
    /// the decay near 1e-31 otherwise.
    pub fn pn_decay(&self, f: &Observable, n_max: usize) -> Vec<f64> {
        let mut g: Vec<f64> = f.values.iter().map(|v| v - f.mean).collect();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(self.norm_sq(&g));
        for _ in 0..n_max {
            g = self.apply(&g);
            let mean: f64 = g.iter().zip(&self.mu).map(|(v, m)| v * m).sum();
            for v in g.iter_mut() {
                *v -= mean;
            }
            out.push(self.norm_sq(&g));
        }
        out
    }

    /// Right spectral gap `1 − λ₂` of a reversible kernel. A single-state
    /// chain has no centered functions to test against, so its gap is the
    /// empty infimum `+∞`.
    pub fn right_spectral_gap(&self) -> Result<f64> {
        if self.n == 1 {
            return Ok(f64::INFINITY);
        }
        let eig = self.symmetrized_eigen()?;
        let mut vals: Vec<f64> = eig.0;
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // vals[0] is the unit eigenvalue
        Ok(1.0 - vals[1])
    }

    /// Eigendecomposition of `D^{1/2} P D^{−1/2}` (requires reversibility).
    ///
    /// Uses cyclic Jacobi rotations: graded matrices (entries spanning many
    /// orders of magnitude, as for deep geometric truncations) keep high
    /// relative accuracy where tridiagonalization-based solvers lose small
    /// eigenvalues.
    pub(crate) fn symmetrized_eigen(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let residual = self.reversibility_residual();
        if residual > REVERSIBILITY_TOL {
            return Err(Error::NotReversible { residual });
        }
        let n = self.n;
        let mut s = DMatrix::<f64>::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                // sqrt(mu_x)·P(x,y)/sqrt(mu_y), kept as separate roots so
                // deep geometric tails neither overflow nor get clamped
                let num = self.mu[x].max(0.0).sqrt() * self.at(x, y);
                s[(x, y)] = if num == 0.0 { 0.0 } else { num / self.mu[y].max(0.0).sqrt() };
            }
        }
        // force exact symmetry against floating-point wobble
        for x in 0..n {
            for y in (x + 1)..n {
                let avg = 0.5 * (s[(x, y)] + s[(y, x)]);
                s[(x, y)] = avg;
                s[(y, x)] = avg;
            }
        }
        Ok(jacobi_eigen(s))
    }

    /// Metropolis-style restriction `P_C` to the states in `c` (sorted,
    /// deduplicated internally): moves leaving `C` are rejected in place.
    pub fn restrict(&self, c: &[usize]) -> Result<Restriction> {
        let mut states: Vec<usize> = c.to_vec();
        states.sort_unstable();
        states.dedup();
        if states.is_empty() || states.iter().any(|&x| x >= self.n) {
            return Err(Error::EmptyRestriction);
        }
        let mass: f64 = states.iter().map(|&x| self.mu[x]).sum();
        if mass <= MASS_TOL {
            return Err(Error::EmptyRestriction);
        }
        let m = states.len();
        let mut rows = vec![vec![0.0; m]; m];
        for (i, &x) in states.iter().enumerate() {
            let mut inside = 0.0;
            for (j, &y) in states.iter().enumerate() {
                rows[i][j] = self.at(x, y);
                inside += self.at(x, y);
            }
            rows[i][i] += 1.0 - inside; // rejected exits hold in place
        }
        let mu_c: Vec<f64> = states.iter().map(|&x| self.mu[x] / mass).collect();
        let kernel = FiniteKernel::with_stationary(rows.clone(), mu_c.clone()).ok();
        Ok(Restriction {
            mu_c_invariant: kernel.is_some(),
            kernel,
            rows,
            mu_c,
            states,
            mass,
        })
    }

    /// Right spectral gap of the restriction `P_C` (reversible parents
    /// only; the restriction of a nonreversible kernel need not be
    /// `μ_C`-invariant and its gap is not defined here).
    pub fn restricted_gap(&self, c: &[usize]) -> Result<f64> {
        let residual = self.reversibility_residual();
        if residual > REVERSIBILITY_TOL {
            return Err(Error::NotReversible { residual });
        }
        let r = self.restrict(c)?;
        let kernel = r.kernel.ok_or(Error::InvalidKernel(
            "restriction is not mu_C-invariant".into(),
        ))?;
        kernel.right_spectral_gap()
    }
}

/// Result of restricting a kernel to a subset.
#[derive(Debug, Clone)]
pub struct Restriction {
    /// The restricted kernel, when `μ_C` is invariant for it (always the
    /// case for reversible parents).
    pub kernel: Option<FiniteKernel>,
    pub rows: Vec<Vec<f64>>,
    pub mu_c: Vec<f64>,
    pub mu_c_invariant: bool,
    /// Original state labels, sorted.
    pub states: Vec<usize>,
    /// `μ(C)` in the parent chain.
    pub mass: f64,
}

/// A real function on states with cached mean, variance and oscillation
/// (the oscillation ranges over positive-mass states only).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Observable {
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub osc: f64,
}

impl Observable {
    pub fn centered(&self) -> Vec<f64> {
        self.values.iter().map(|v| v - self.mean).collect()
    }
}

fn flatten_and_check(rows: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidKernel("empty kernel".into()));
    }
    let mut p = Vec::with_capacity(n * n);
    for (x, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidKernel(format!("row {x} has length {}", row.len())));
        }
        let mut sum = 0.0;
        for &v in row {
            if v.is_nan() || v < 0.0 || v.is_infinite() {
                return Err(Error::InvalidKernel(format!("negative or non-finite entry in row {x}")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidKernel(format!("row {x} sums to {sum:.15}")));
        }
        p.extend_from_slice(row);
    }
    Ok(p)
}

/// Stationary distribution by SVD least squares on the augmented system
/// `[Pᵀ − I; 1ᵀ] μ = [0; 1]`.
fn stationary(n: usize, p: &[f64]) -> Result<Vec<f64>> {
    let mut a = DMatrix::<f64>::zeros(n + 1, n);
    for y in 0..n {
        for x in 0..n {
            a[(y, x)] = p[x * n + y] - if x == y { 1.0 } else { 0.0 };
        }
    }
    for x in 0..n {
        a[(n, x)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n + 1);
    b[n] = 1.0;
    let svd = a.svd(true, true);
    let mu = svd
        .solve(&b, 1e-13)
        .map_err(|e| Error::NumericalFailure(format!("stationary solve failed: {e}")))?;
    let mut mu: Vec<f64> = mu.iter().copied().collect();
    for m in mu.iter_mut() {
        if *m < 0.0 {
            if *m < -1e-9 {
                return Err(Error::NumericalFailure(
                    "stationary solve produced negative mass".into(),
                ));
            }
            *m = 0.0;
        }
    }
    let total: f64 = mu.iter().sum();
    if total <= 0.0 {
        return Err(Error::NumericalFailure("stationary solve degenerate".into()));
    }
    for m in mu.iter_mut() {
        *m /= total;
    }
    Ok(mu)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix: eigenvalues and
/// the orthonormal eigenvector matrix (columns).
fn jacobi_eigen(mut a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    (vals, v)
}

fn identity_rows(n: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    rows
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for x in 0..n {
        for k in 0..n {
            let v = a[x][k];
            if v == 0.0 {
                continue;
            }
            for y in 0..n {
                out[x][y] += v * b[k][y];
            }
        }
    }
    out
}

/// Both Dirichlet forms of `f` under `P` and `P*P`, with the two-sided
/// comparison `2ε·E(P,f) <= E(P*P,f) <= 2·E(P,f)` evaluated (the lower
/// bound applies when every holding probability is at least `ε > 0`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PpBounds {
    pub e_p: f64,
    pub e_pp: f64,
    pub min_holding: f64,
    pub upper_ok: bool,
    pub lower_ok: Option<bool>,
}

pub fn dirichlet_pp_bounds(kernel: &FiniteKernel, f: &Observable) -> Result<PpBounds> {
    let pp = kernel.multiplicative_reversibilization()?;
    let fc = f.centered();
    let e_p = kernel.dirichlet_form(&fc);
    let e_pp = pp.dirichlet_form(&fc);
    let min_holding = (0..kernel.n())
        .filter(|&x| kernel.mu()[x] > MASS_TOL)
        .map(|x| kernel.at(x, x))
        .fold(f64::INFINITY, f64::min);
    let scale = e_p.abs().max(1.0);
    let upper_ok = e_pp <= 2.0 * e_p + 1e-12 * scale;
    let lower_ok = if min_holding > 0.0 {
        Some(e_pp >= 2.0 * min_holding * e_p - 1e-12 * scale)
    } else {
        None
    };
    Ok(PpBounds { e_p, e_pp, min_holding, upper_ok, lower_ok })
}

/// Reachability verdict for the RUPI test on a finite chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RupiReport {
    pub irreducible: bool,
    /// A pair of positive-mass singletons `(a, b)` with
    /// `<1_a, Σ_{n<=N} Tⁿ 1_b> = 0` when reducible.
    pub witness: Option<(usize, usize)>,
}

/// Finite-state RUPI check: every pair of positive-mass states must
/// communicate through the support graph of `Σ_{n <= n_states} Tⁿ`.
pub fn rupi_check(kernel: &FiniteKernel) -> RupiReport {
    let n = kernel.n();
    let support: Vec<usize> = (0..n).filter(|&x| kernel.mu()[x] > MASS_TOL).collect();
    let words = n.div_ceil(64);
    let mut reach: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    for &x in &support {
        // BFS over edges with positive transition probability
        let r = &mut reach[x];
        r[x / 64] |= 1 << (x % 64);
        let mut frontier = vec![x];
        while let Some(u) = frontier.pop() {
            for v in 0..n {
                if kernel.at(u, v) > 1e-14 && r[v / 64] & (1 << (v % 64)) == 0 {
                    r[v / 64] |= 1 << (v % 64);
                    frontier.push(v);
                }
            }
        }
    }
    for &x in &support {
        for &y in &support {
            if reach[x][y / 64] & (1 << (y % 64)) == 0 {
                return RupiReport { irreducible: false, witness: Some((x, y)) };
            }
        }
    }
    RupiReport { irreducible: true, witness: None }
}

/// WPI from a family of restrictions: the certified rate is the step
/// function `β(s) = 1 ∧ inf { μ(A^∁) : Gap(P_A) >= μ(A)/s }` over the
/// supplied sets.
pub fn wpi_from_restrictions(
    kernel: &FiniteKernel,
    family: &[Vec<usize>],
) -> Result<WpiCertificate> {
    if family.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let mut cuts: Vec<(f64, f64)> = Vec::with_capacity(family.len());
    for c in family {
        let gap = kernel.restricted_gap(c)?;
        if gap <= 0.0 {
            continue;
        }
        let mass: f64 = c.iter().map(|&x| kernel.mu()[x]).sum();
        // complement mass computed directly so the full space gives exact 0
        let mut in_c = vec![false; kernel.n()];
        for &x in c {
            in_c[x] = true;
        }
        let tail: f64 = (0..kernel.n())
            .filter(|&x| !in_c[x])
            .map(|x| kernel.mu()[x])
            .sum();
        let s_activate = mass / gap;
        cuts.push((s_activate, tail));
    }
    if cuts.is_empty() {
        return Err(Error::ZeroConductance("no restriction has a spectral gap".into()));
    }
    cuts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut grid = Vec::with_capacity(cuts.len() + 1);
    let mut values = Vec::with_capacity(cuts.len() + 1);
    grid.push(cuts[0].0 * 0.5);
    values.push(1.0);
    let mut best = 1.0f64;
    for (s, tail) in cuts {
        best = best.min(tail);
        match grid.last() {
            Some(last) if s <= *last => {
                let v = values.last_mut().unwrap();
                *v = f64::min(*v, best);
            }
            _ => {
                grid.push(s);
                values.push(best);
            }
        }
    }
    // clamp tiny negatives from mass roundoff
    for v in values.iter_mut() {
        *v = v.max(0.0);
    }
    WpiCertificate::beta(
        Sieve::OscSq,
        MonotoneRate::tabulated(grid, values, Interp::Step),
        OSC_SQ_A_BOUND,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_stationary_and_dirichlet() {
        let k = FiniteKernel::two_state(0.3, 0.3).unwrap();
        assert!((k.mu()[0] - 0.5).abs() < 1e-12);
        // E(P, 1_{0}) = mu⊗P(A×A^c) = 0.5·0.3
        let f = k.indicator(&[0]);
        assert!((k.dirichlet_form(&f.values) - 0.15).abs() < 1e-14);
    }

    #[test]
    fn constant_observable_has_zero_energy_and_decay() {
        let k = FiniteKernel::two_state(0.2, 0.7).unwrap();
        let f = k.observable(vec![3.0, 3.0]);
        assert_eq!(k.dirichlet_form(&f.values), 0.0);
        let decay = k.pn_decay(&f, 5);
        assert!(decay.iter().all(|v| *v < 1e-28));
    }

    #[test]
    fn indicator_energy_equals_cross_flow() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let k = FiniteKernel::random_reversible(6, &mut rng);
            let mask: u32 = rng.random_range(1..63);
            let members: Vec<usize> = (0..6).filter(|i| mask >> i & 1 == 1).collect();
            let f = k.indicator(&members);
            // direct double sum, independent of the energy identity
            let mut flow = 0.0;
            for &x in &members {
                for y in 0..6 {
                    if !members.contains(&y) {
                        flow += k.mu()[x] * k.at(x, y);
                    }
                }
            }
            let energy = k.dirichlet_form(&f.values);
            assert!((energy - flow).abs() < 1e-14, "{energy} vs {flow}");
            // centered square never exceeds the squared oscillation
            let centered = f.centered();
            assert!(k.norm_sq(&centered) <= f.osc * f.osc + 1e-15);
        }
    }

    #[test]
    fn independent_kernel_energy_is_variance() {
        let mu = vec![0.2, 0.3, 0.5];
        let k = FiniteKernel::independent(mu).unwrap();
        let f = k.indicator(&[0, 2]);
        let e = k.dirichlet_form(&f.values);
        assert!((e - f.variance).abs() < 1e-14);
        // one-step equilibration
        let decay = k.pn_decay(&f, 3);
        assert!(decay[1] < 1e-28 && decay[2] < 1e-28);
    }

    #[test]
    fn adjoint_of_reversible_is_identity_map() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let k = FiniteKernel::random_reversible(5, &mut rng);
        let adj = k.adjoint().unwrap();
        for x in 0..5 {
            for y in 0..5 {
                assert!((k.at(x, y) - adj.at(x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_of_cycle_is_reverse_cycle() {
        let k = FiniteKernel::cycle(3).unwrap();
        let adj = k.adjoint().unwrap();
        for i in 0..3usize {
            assert!((adj.at((i + 1) % 3, i) - 1.0).abs() < 1e-14);
        }
        // involution
        let back = adj.adjoint().unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert!((back.at(x, y) - k.at(x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lazy_diagonal_grows() {
        let k = FiniteKernel::cycle(4).unwrap();
        let lz = k.lazy(0.3).unwrap();
        for i in 0..4 {
            assert!(lz.at(i, i) >= 0.3);
        }
        assert!(k.lazy(0.0).is_err());
    }

    #[test]
    fn energy_matches_additive_reversibilization() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // nonreversible kernel: lazy cycle mixture
        let k = FiniteKernel::cycle(5).unwrap().lazy(0.4).unwrap();
        let s = k.additive_reversibilization().unwrap();
        for _ in 0..20 {
            let f: Vec<f64> = (0..5).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
            assert!((k.dirichlet_form(&f) - s.dirichlet_form(&f)).abs() < 1e-12);
        }
    }

    #[test]
    fn pp_bounds_hold_on_random_kernels() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            // random 6-state stochastic matrix with strictly positive rows
            let rows: Vec<Vec<f64>> = (0..6)
                .map(|_| {
                    let mut r: Vec<f64> = (0..6).map(|_| rng.random_range(0.01..1.0)).collect();
                    let s: f64 = r.iter().sum();
                    r.iter_mut().for_each(|v| *v /= s);
                    r
                })
                .collect();
            let k = FiniteKernel::from_rows(rows).unwrap();
            let f = k.observable((0..6).map(|_| rng.random_range(-2.0..2.0)).collect());
            let b = dirichlet_pp_bounds(&k, &f).unwrap();
            assert!(b.upper_ok, "E(P*P,f) <= 2E(P,f) failed");
            assert_eq!(b.lower_ok, Some(true), "holding lower bound failed");
        }
    }

    #[test]
    fn pp_for_projection_kernel_is_idempotent() {
        let k = FiniteKernel::independent(vec![0.25, 0.25, 0.5]).unwrap();
        let f = k.observable(vec![1.0, -1.0, 0.5]);
        let b = dirichlet_pp_bounds(&k, &f).unwrap();
        // Π*Π = Π: both energies equal the variance
        assert!((b.e_p - b.e_pp).abs() < 1e-13);
        assert!(b.upper_ok);
    }

    #[test]
    fn half_lazy_chain_pp_dominates_p() {
        let k = FiniteKernel::two_state(0.5, 0.5).unwrap().lazy(0.5).unwrap();
        let f = k.observable(vec![1.0, 0.0]);
        let b = dirichlet_pp_bounds(&k, &f).unwrap();
        assert!(b.e_pp >= b.e_p - 1e-14);
    }

    #[test]
    fn zero_mass_state_blocks_adjoint_until_restricted() {
        let rows = vec![
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![1.0, 0.0, 0.0],
        ];
        let k = FiniteKernel::with_stationary(rows, vec![0.5, 0.5, 0.0]).unwrap();
        assert!(matches!(k.adjoint(), Err(Error::ZeroMassState(2))));
        let (supported, kept) = k.support_restrict();
        assert_eq!(kept, vec![0, 1]);
        supported.adjoint().unwrap();
    }

    #[test]
    fn rupi_on_cycle_and_blocks() {
        // periodic but irreducible
        let k = FiniteKernel::cycle(3).unwrap();
        assert!(rupi_check(&k).irreducible);
        // block diagonal is reducible with a witness
        let rows = vec![
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.5, 0.5, 0.0, 0.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.0, 0.0, 0.5, 0.5],
        ];
        let blocks = FiniteKernel::with_stationary(rows, vec![0.25; 4]).unwrap();
        let rep = rupi_check(&blocks);
        assert!(!rep.irreducible);
        let (a, b) = rep.witness.unwrap();
        assert!((a < 2) != (b < 2));
    }

    #[test]
    fn restriction_to_full_space_is_identity() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let k = FiniteKernel::random_reversible(5, &mut rng);
        let r = k.restrict(&[0, 1, 2, 3, 4]).unwrap();
        assert!(r.mu_c_invariant);
        let kr = r.kernel.unwrap();
        for x in 0..5 {
            for y in 0..5 {
                assert!((kr.at(x, y) - k.at(x, y)).abs() < 1e-14);
            }
        }
        // full-space certificate vanishes past the inverse gap
        let cert = wpi_from_restrictions(&k, &[vec![0, 1, 2, 3, 4]]).unwrap();
        let gap = k.right_spectral_gap().unwrap();
        assert_eq!(cert.eval_beta(1.0 / gap * 1.001), 0.0);
        assert!(cert.eval_beta(1.0 / gap * 0.5) > 0.0);
    }

    #[test]
    fn restriction_of_reversible_is_reversible() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let k = FiniteKernel::random_reversible(7, &mut rng);
        let r = k.restrict(&[0, 2, 3, 5]).unwrap();
        let kr = r.kernel.expect("restriction of reversible kernel is mu_C-reversible");
        assert!(kr.is_reversible());
        assert!(k.restricted_gap(&[0, 2, 3, 5]).unwrap() > 0.0);
    }

    #[test]
    fn empty_restriction_is_rejected() {
        let k = FiniteKernel::two_state(0.5, 0.5).unwrap();
        assert!(matches!(k.restrict(&[]), Err(Error::EmptyRestriction)));
    }
}
