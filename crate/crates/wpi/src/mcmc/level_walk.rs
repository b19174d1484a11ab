//! The level-walk chain: deterministic rightward motion along level `i`
//! until `(i, i)`, then a jump to the start of a fresh level drawn from
//! `ν`. With ν supported on `{1..i0}` the products `(P*)^k P^k` are
//! reducible for all `k < i0 − 1` yet irreducible once `k >= i0`.

use crate::chain::FiniteKernel;
use crate::error::{Error, Result};

/// Exact level-walk kernel and its adjoint over the support
/// `{(i, j) : 1 <= j <= i <= i0}`.
#[derive(Debug, Clone)]
pub struct LevelWalk {
    pub p: FiniteKernel,
    pub p_star: FiniteKernel,
    /// State labels `(level, position)` in index order.
    pub states: Vec<(usize, usize)>,
}

impl LevelWalk {
    pub fn index_of(&self, level: usize, pos: usize) -> Option<usize> {
        self.states.iter().position(|&(i, j)| i == level && j == pos)
    }
}

/// Build the chain for a mass function `nu` on levels `1..=i0`
/// (`nu[i-1]` is the mass of level `i`; it is renormalized internally).
pub fn level_walk_build(i0: usize, nu: &[f64]) -> Result<LevelWalk> {
    if i0 < 2 {
        return Err(Error::BadSupport("need at least two levels".into()));
    }
    if nu.len() != i0 {
        return Err(Error::BadSupport(format!("nu must have length {i0}")));
    }
    if nu.iter().any(|p| *p <= 0.0) {
        return Err(Error::BadSupport("case-1 walk needs nu positive on 1..=i0".into()));
    }
    let total: f64 = nu.iter().sum();
    let nu: Vec<f64> = nu.iter().map(|p| p / total).collect();

    let mut states = Vec::new();
    for i in 1..=i0 {
        for j in 1..=i {
            states.push((i, j));
        }
    }
    let n = states.len();
    let idx = |i: usize, j: usize| -> usize { i * (i - 1) / 2 + (j - 1) };

    // mu(i, j) = nu(i)/sum_k nu(k)·k on j <= i
    let norm: f64 = (1..=i0).map(|k| nu[k - 1] * k as f64).sum();
    let mu: Vec<f64> = states.iter().map(|&(i, _)| nu[i - 1] / norm).collect();

    let mut p_rows = vec![vec![0.0; n]; n];
    let mut pstar_rows = vec![vec![0.0; n]; n];
    for (s, &(i, j)) in states.iter().enumerate() {
        if j < i {
            p_rows[s][idx(i, j + 1)] = 1.0;
        } else {
            for ip in 1..=i0 {
                p_rows[s][idx(ip, 1)] = nu[ip - 1];
            }
        }
        if j > 1 {
            pstar_rows[s][idx(i, j - 1)] = 1.0;
        } else {
            for ip in 1..=i0 {
                pstar_rows[s][idx(ip, ip)] = nu[ip - 1];
            }
        }
    }
    let p = FiniteKernel::with_stationary(p_rows, mu.clone())?;
    let p_star = FiniteKernel::with_stationary(pstar_rows, mu)?;
    Ok(LevelWalk { p, p_star, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::rupi_check;

    fn geometric_nu(i0: usize, a: f64) -> Vec<f64> {
        (1..=i0).map(|i| (1.0 - a) * a.powi(i as i32 - 1)).collect()
    }

    #[test]
    fn stationary_matches_power_iteration() {
        let walk = level_walk_build(3, &geometric_nu(3, 0.5)).unwrap();
        // power-iterate mu_0 P^n against the closed form
        let n = walk.p.n();
        let mut dist = vec![1.0 / n as f64; n];
        for _ in 0..4000 {
            let mut next = vec![0.0; n];
            for (x, d) in dist.iter().enumerate() {
                for (y, cell) in next.iter_mut().enumerate() {
                    *cell += d * walk.p.at(x, y);
                }
            }
            dist = next;
        }
        for (got, want) in dist.iter().zip(walk.p.mu()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn closed_form_adjoint_matches_matrix_adjoint() {
        let walk = level_walk_build(4, &geometric_nu(4, 0.4)).unwrap();
        let adj = walk.p.adjoint().unwrap();
        for x in 0..walk.p.n() {
            for y in 0..walk.p.n() {
                assert!(
                    (adj.at(x, y) - walk.p_star.at(x, y)).abs() < 1e-12,
                    "adjoint mismatch at ({x},{y})"
                );
            }
        }
    }

    #[test]
    fn reducibility_pattern_in_k() {
        let i0 = 3;
        let walk = level_walk_build(i0, &geometric_nu(i0, 0.5)).unwrap();
        // (P*)P is reducible with witness (i0, i0) returning to itself
        let t1 = walk.p.adjoint_power_product(1).unwrap();
        let rep = rupi_check(&t1);
        assert!(!rep.irreducible);
        let top = walk.index_of(i0, i0).unwrap();
        assert!((t1.at(top, top) - 1.0).abs() < 1e-12);
        // k >= i0 is irreducible
        let t3 = walk.p.adjoint_power_product(i0).unwrap();
        assert!(rupi_check(&t3).irreducible);
    }

    #[test]
    fn deterministic_excursions_have_zero_energy() {
        // f_k = 1_{A_k} − mu(A_k) with A_k = {(i,i) : i > k} has zero
        // Dirichlet energy under (P*)^k P^k
        let i0 = 4;
        let walk = level_walk_build(i0, &geometric_nu(i0, 0.5)).unwrap();
        for k in 1..i0 - 1 {
            let t = walk.p.adjoint_power_product(k).unwrap();
            let members: Vec<usize> = walk
                .states
                .iter()
                .enumerate()
                .filter(|(_, &(i, j))| i == j && i > k)
                .map(|(s, _)| s)
                .collect();
            let f = walk.p.indicator(&members);
            let energy = t.dirichlet_form(&f.values);
            assert!(energy.abs() < 1e-12, "k={k}: energy {energy}");
        }
    }

    #[test]
    fn bad_support_is_rejected() {
        assert!(level_walk_build(1, &[1.0]).is_err());
        assert!(level_walk_build(3, &[0.5, 0.5]).is_err());
        assert!(level_walk_build(3, &[0.5, 0.5, 0.0]).is_err());
    }
}
