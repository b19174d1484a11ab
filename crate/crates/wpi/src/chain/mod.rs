//! Exact ground truth on finite state spaces: kernels, Dirichlet forms,
//! spectra, weak conductance by exhaustive subset enumeration, restrictions
//! and the set-based lower-bound constructions.

mod conductance;
mod kernel;
mod spectral;

pub use conductance::{
    alpha_star_lower, sticky_floor_value,
    beta_star_lower, cheeger_converse, cheeger_wpi, sticky_polynomial_floor, weak_conductance,
    BetaStarReport, CheegerConverseReport, ConductanceMode, ConductanceProfile, CutPoint,
    IndicatorMode, EXHAUSTIVE_STATE_CAP,
};
pub use kernel::{
    dirichlet_pp_bounds, rupi_check, wpi_from_restrictions, FiniteKernel, Observable, PpBounds,
    Restriction, RupiReport, MASS_TOL,
};
pub use spectral::{phi_beta_eval, phi_beta_profile, SpectralMeasure};
