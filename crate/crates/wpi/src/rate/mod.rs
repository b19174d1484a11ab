//! Calculus of decreasing rate functions: the α/β/γ parametrizations of a
//! weak Poincaré inequality and everything derived from them.

mod certificate;
mod kstar;
mod monotone;
mod ops;

pub use certificate::{
    alpha_to_beta, beta_to_alpha,
    ConvergenceProfile, Parametrization, ProfileOrigin, Sieve, WpiCertificate, OSC_SQ_A_BOUND,
};
pub use kstar::{k_transform, KStar};
pub use monotone::{generalized_inverse, Interp, MonotoneRate, DOMAIN_FLOOR};
pub use ops::{
    asym_var_bound, beta_from_gamma, gamma_from_beta, gamma_p_extend, infimal_convolution,
    iterate_bound, order_rates, spectral_mass_bound, BetaFromGammaMode, OrderReport,
    PointwiseOrder,
};
