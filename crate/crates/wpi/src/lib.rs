//! Weak Poincaré inequalities (WPIs) for discrete-time Markov chains.
//!
//! A WPI quantifies subgeometric convergence to equilibrium. For a
//! μ-invariant kernel `T`, a sieve `Φ` and a decreasing function `α`,
//! the α-form reads
//!
//! ```text
//! ||f||² <= α(r)·E(T,f) + r·Φ(f)    for all r > 0, f centered,
//! ```
//!
//! and the equivalent β-form is
//!
//! ```text
//! ||f||² <= s·E(T,f) + β(s)·Φ(f)    for all s > 0, β(s) -> 0.
//! ```
//!
//! Here `E(T,f) = <(Id−T)f, f>` is the Dirichlet form and `Φ` is typically
//! the squared oscillation `||·||²_osc`. From a β-form WPI for `P*P` one
//! extracts a convergence profile `γ` with `||Pⁿf||² <= γ(n)·Φ(f)` by
//! integrating the reciprocal of the convex conjugate of `K(u) = u·β(1/u)`.
//!
//! The crate is organised in four layers:
//!
//! - [`rate`]: pure one-dimensional calculus on decreasing rate functions:
//!   generalized inverses, the `K*` transform, `γ` extraction, iterate
//!   bounds, converses, asymptotic-variance and spectral-mass bounds.
//! - [`chain`]: exact linear algebra on finite state spaces: Dirichlet
//!   forms, spectral measures, weak conductance by exhaustive subset
//!   enumeration, restrictions, and lower-bound constructions. This is the
//!   ground-truth engine every certified bound is checked against.
//! - [`bounds`]: WPI constructors from structural hypotheses: Lyapunov
//!   drift (geometric and subgeometric), minorization, isoperimetry, and
//!   conductance envelopes.
//! - [`mcmc`]: worked kernels: the independence sampler on geometric
//!   targets (closed-form spectrum), a pseudo-marginal ABC chain, the
//!   level-walk reducibility example, and random-walk Metropolis bounds
//!   with Monte Carlo counterparts.
//!
//! [`validate`] wires the pieces into the end-to-end soundness checks that
//! `wpi-cli validate-all` and the acceptance test suite both run.
//!
//! # Example
//!
//! Certify a decay rate for a small reversible chain from its exhaustive
//! weak-conductance profile, then check it against the exact decay:
//!
//! ```
//! use wpi::chain::{weak_conductance, ConductanceMode, FiniteKernel};
//! use wpi::rate::{alpha_to_beta, gamma_from_beta};
//!
//! let p = FiniteKernel::from_rows(vec![
//!     vec![0.50, 0.25, 0.25],
//!     vec![0.25, 0.50, 0.25],
//!     vec![0.25, 0.25, 0.50],
//! ])?;
//! // certificates live on the multiplicative reversibilization path
//! let t = p.multiplicative_reversibilization()?;
//! let profile = weak_conductance(&t, ConductanceMode::Exhaustive, 1)?;
//! let beta = alpha_to_beta(&profile.to_alpha_certificate()?)?;
//! let gamma = gamma_from_beta(&beta, 50)?;
//!
//! let f = t.observable(vec![1.0, -1.0, 0.0]);
//! let decay = t.pn_decay(&f, 50);
//! for (n, d) in decay.iter().enumerate() {
//!     assert!(*d <= gamma.value(n) * f.osc * f.osc + 1e-9);
//! }
//! # Ok::<(), wpi::Error>(())
//! ```

pub mod bounds;
pub mod chain;
pub mod error;
pub mod io;
pub mod mcmc;
pub mod num;
pub mod rate;
pub mod validate;

pub use error::{Error, Result};
