//! Nonincreasing rate functions on `(0, ∞)` and their generalized inverses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arguments below this floor are clamped to the value at the floor; the
/// tabulated fallback spans `[1e-8, 1e8]` by default.
pub const DOMAIN_FLOOR: f64 = 1e-8;

/// Interpolation convention for tabulated rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    /// Right-continuous step: value `values[i]` on `[grid[i], grid[i+1])`.
    Step,
    /// Piecewise linear between grid nodes, clamped outside.
    Linear,
}

/// A nonnegative, nonincreasing function of one positive real argument.
///
/// This single type carries every rate the library manipulates: α and β of
/// a WPI, convergence profiles γ sampled on integers, conductance-derived
/// step functions and drift-derived envelopes. Evaluation returns
/// `f64::INFINITY` as a first-class sentinel where an infimum over an empty
/// set occurs (`inf ∅ = ∞`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum MonotoneRate {
    /// `s ↦ c · s^(−p)` with `c, p > 0`.
    PowerLaw { c: f64, p: f64 },
    /// `s ↦ c · exp(−λ s^θ)`.
    ExpPower { c: f64, lambda: f64, theta: f64 },
    /// `s ↦ (ln(c/s)/λ)^(1/θ)` for `s < c`, else `0`; the generalized
    /// inverse of [`MonotoneRate::ExpPower`] with the same parameters.
    LogPower { c: f64, lambda: f64, theta: f64 },
    /// Constant `c ≥ 0`.
    Constant { c: f64 },
    /// Tabulated values on a strictly increasing positive grid, with
    /// nonincreasing nonnegative values.
    Tabulated {
        grid: Vec<f64>,
        values: Vec<f64>,
        interp: Interp,
    },
    /// Generalized inverse `x ↦ inf{ y > 0 : inner(y) <= x }` of another
    /// rate, evaluated exactly for tabulated and constant inner forms and
    /// by monotone bisection otherwise.
    Inverse { inner: Box<MonotoneRate> },
}

impl MonotoneRate {
    pub fn power_law(c: f64, p: f64) -> Self {
        MonotoneRate::PowerLaw { c, p }
    }

    pub fn constant(c: f64) -> Self {
        MonotoneRate::Constant { c }
    }

    /// Step-tabulated rate; panics if the grid is not strictly increasing
    /// positive or the values increase.
    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>, interp: Interp) -> Self {
        assert_eq!(grid.len(), values.len());
        assert!(!grid.is_empty());
        assert!(grid[0] > 0.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]), "grid must increase");
        assert!(
            values.windows(2).all(|w| w[1] <= w[0] + 1e-15),
            "values must not increase"
        );
        assert!(values.iter().all(|v| *v >= 0.0 && v.is_finite()));
        MonotoneRate::Tabulated { grid, values, interp }
    }

    /// Evaluate at `s > 0`; arguments below [`DOMAIN_FLOOR`] are clamped.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.max(DOMAIN_FLOOR);
        match self {
            MonotoneRate::PowerLaw { c, p } => c * s.powf(-p),
            MonotoneRate::ExpPower { c, lambda, theta } => c * (-lambda * s.powf(*theta)).exp(),
            MonotoneRate::LogPower { c, lambda, theta } => {
                if s >= *c {
                    0.0
                } else {
                    ((c / s).ln() / lambda).powf(1.0 / theta)
                }
            }
            MonotoneRate::Constant { c } => *c,
            MonotoneRate::Tabulated { grid, values, interp } => {
                eval_tabulated(grid, values, *interp, s)
            }
            MonotoneRate::Inverse { inner } => eval_inverse(inner, s),
        }
    }

    /// Value at the domain floor: the effective supremum of the rate.
    pub fn top(&self) -> f64 {
        self.eval(DOMAIN_FLOOR)
    }

    /// Whether the rate tends to zero at infinity, decided analytically for
    /// closed forms and at the largest grid point for tabulated data.
    pub fn vanishes_at_infinity(&self) -> bool {
        match self {
            MonotoneRate::PowerLaw { .. } => true,
            MonotoneRate::ExpPower { .. } => true,
            MonotoneRate::LogPower { .. } => true,
            MonotoneRate::Constant { c } => *c == 0.0,
            MonotoneRate::Tabulated { values, .. } => {
                let top = values[0].max(1.0);
                *values.last().unwrap() <= 1e-9 * top
            }
            MonotoneRate::Inverse { .. } => {
                let tail = self.eval(1e15);
                tail <= 1e-9 * self.top().clamp(1.0, 1e12)
            }
        }
    }

    /// The rate with a rescaled argument: `g(s) = f(factor·s)`.
    ///
    /// Used to move a WPI between Dirichlet forms that compare by a
    /// constant, e.g. `E(P*P, f) >= 2ε·E(P, f)` turns a β for `P` into
    /// `s ↦ β(2ε·s)` for `P*P`. Inverse-backed rates are first sampled
    /// onto a step grid whose left values never underestimate.
    pub fn scale_argument(&self, factor: f64) -> MonotoneRate {
        assert!(factor > 0.0 && factor.is_finite());
        match self {
            MonotoneRate::PowerLaw { c, p } => MonotoneRate::PowerLaw {
                c: c * factor.powf(-p),
                p: *p,
            },
            MonotoneRate::ExpPower { c, lambda, theta } => MonotoneRate::ExpPower {
                c: *c,
                lambda: lambda * factor.powf(*theta),
                theta: *theta,
            },
            MonotoneRate::LogPower { c, lambda, theta } => MonotoneRate::LogPower {
                c: c / factor,
                lambda: *lambda,
                theta: *theta,
            },
            MonotoneRate::Constant { c } => MonotoneRate::Constant { c: *c },
            MonotoneRate::Tabulated { grid, values, interp } => MonotoneRate::Tabulated {
                grid: grid.iter().map(|g| g / factor).collect(),
                values: values.clone(),
                interp: *interp,
            },
            MonotoneRate::Inverse { .. } => {
                let grid = crate::num::log_grid(DOMAIN_FLOOR, 1e10, 4096);
                let values: Vec<f64> = grid.iter().map(|s| self.eval(s * factor)).collect();
                let mut v = values;
                for i in 1..v.len() {
                    if v[i] > v[i - 1] {
                        v[i] = v[i - 1];
                    }
                }
                // replace infinities by the largest finite value seen
                let cap = v.iter().cloned().filter(|x| x.is_finite()).fold(0.0, f64::max);
                for x in v.iter_mut() {
                    if !x.is_finite() {
                        *x = cap;
                    }
                }
                MonotoneRate::Tabulated { grid, values: v, interp: Interp::Step }
            }
        }
    }

    /// Sampled monotonicity/nonnegativity check over a log grid.
    pub fn validate(&self) -> Result<()> {
        let grid = crate::num::log_grid(DOMAIN_FLOOR, 1e10, 128);
        let mut prev = f64::INFINITY;
        for &s in &grid {
            let v = self.eval(s);
            if v.is_nan() {
                return Err(Error::NumericalFailure(format!("rate NaN at s={s}")));
            }
            if v < 0.0 {
                return Err(Error::DomainError(format!("negative rate at s={s}")));
            }
            if v > prev + 1e-12 * prev.clamp(1.0, 1e300) {
                return Err(Error::DomainError(format!("rate increases at s={s}")));
            }
            prev = v;
        }
        Ok(())
    }
}

fn eval_tabulated(grid: &[f64], values: &[f64], interp: Interp, s: f64) -> f64 {
    if s < grid[0] {
        return values[0];
    }
    if s >= *grid.last().unwrap() {
        return *values.last().unwrap();
    }
    // last i with grid[i] <= s
    let i = match grid.binary_search_by(|g| g.partial_cmp(&s).unwrap()) {
        Ok(i) => i,
        Err(i) => i - 1,
    };
    match interp {
        Interp::Step => values[i],
        Interp::Linear => {
            let t = (s - grid[i]) / (grid[i + 1] - grid[i]);
            values[i] + t * (values[i + 1] - values[i])
        }
    }
}

/// `inf{ y > 0 : f(y) <= x }` with `inf ∅ = ∞`.
fn eval_inverse(inner: &MonotoneRate, x: f64) -> f64 {
    let top = inner.top();
    if top <= x {
        // f is at most x already arbitrarily close to 0.
        return 0.0;
    }
    match inner {
        MonotoneRate::Tabulated { grid, values, interp } => {
            invert_tabulated(grid, values, *interp, x)
        }
        MonotoneRate::Constant { c } => {
            if x >= *c {
                0.0
            } else {
                f64::INFINITY
            }
        }
        MonotoneRate::PowerLaw { c, p } => (c / x).powf(1.0 / p),
        MonotoneRate::ExpPower { c, lambda, theta } => {
            if x >= *c {
                0.0
            } else {
                ((c / x).ln() / lambda).powf(1.0 / theta)
            }
        }
        MonotoneRate::LogPower { c, lambda, theta } => c * (-lambda * x.powf(*theta)).exp(),
        MonotoneRate::Inverse { .. } => invert_by_bisection(inner, x),
    }
}

fn invert_tabulated(grid: &[f64], values: &[f64], interp: Interp, x: f64) -> f64 {
    let last = *values.last().unwrap();
    if x < last {
        return f64::INFINITY;
    }
    // values are nonincreasing: find the first index with values[i] <= x.
    let mut lo = 0usize;
    let mut hi = values.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if values[mid] <= x {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let i = lo; // first index with value <= x; i >= 1 since values[0] > x here
    match interp {
        Interp::Step => grid[i],
        Interp::Linear => {
            if i == 0 {
                return grid[0];
            }
            let (v0, v1) = (values[i - 1], values[i]);
            if v0 <= v1 {
                // flat run: the drop point is the left node of the segment
                grid[i - 1]
            } else {
                grid[i - 1] + (grid[i] - grid[i - 1]) * (v0 - x) / (v0 - v1)
            }
        }
    }
}

fn invert_by_bisection(f: &MonotoneRate, x: f64) -> f64 {
    // Expand an upper bracket until f(hi) <= x.
    let mut hi = 1.0;
    let mut found = false;
    for _ in 0..2100 {
        if f.eval(hi) <= x {
            found = true;
            break;
        }
        hi *= 2.0;
        if hi > 1e302 {
            break;
        }
    }
    if !found {
        return f64::INFINITY;
    }
    let mut lo = hi / 2.0;
    while lo > 1e-300 && f.eval(lo) <= x {
        hi = lo;
        lo /= 2.0;
    }
    if f.eval(lo) <= x {
        return 0.0;
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.eval(mid) <= x {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Generalized inverse `g(x) = inf{ y > 0 : f(y) <= x }` of a nonincreasing
/// rate, symbolic where a closed form exists.
pub fn generalized_inverse(f: &MonotoneRate) -> MonotoneRate {
    match f {
        MonotoneRate::PowerLaw { c, p } => MonotoneRate::PowerLaw {
            c: c.powf(1.0 / p),
            p: 1.0 / p,
        },
        MonotoneRate::ExpPower { c, lambda, theta } => MonotoneRate::LogPower {
            c: *c,
            lambda: *lambda,
            theta: *theta,
        },
        MonotoneRate::LogPower { c, lambda, theta } => MonotoneRate::ExpPower {
            c: *c,
            lambda: *lambda,
            theta: *theta,
        },
        other => MonotoneRate::Inverse {
            inner: Box::new(other.clone()),
        },
    }
}
