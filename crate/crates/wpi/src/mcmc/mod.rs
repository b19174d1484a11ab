//! Worked kernels and closed-form bounds: the independence sampler on
//! geometric targets, a pseudo-marginal ABC chain, the level-walk
//! reducibility example, random-walk Metropolis in high dimension, heavy
//! tails, and the CLT criterion.

mod abc;
mod clt;
mod imh;
mod level_walk;
mod rng;
mod rwm;

pub use abc::{abc_beta_floor, abc_build, AbcChain, AbcFloor};
pub use clt::{
    clt_check_exact, clt_check_profile, clt_p_threshold, CltReport, CltVerdict,
    CLT_CRITICAL_SLOPE, CLT_SLOPE_MARGIN,
};
pub use imh::{
    imh_asymvar_criterion, imh_build, imh_spectrum, imh_spectrum_validate, AsymVarVerdict,
    ImhAsymVarDiag, ImhGeometric, ImhValidation,
};
pub use level_walk::{level_walk_build, LevelWalk};
pub use rng::{normal_vec, stream_rng};
pub use rwm::{
    accept_ceiling_check, chi2_tail_check, gauss_accept_check, gaussian_kappa_limit,
    heavy_tail_floor, pinsker_check, rwm_conductance_mc, rwm_gap_bounds, AcceptCeilingReport,
    Chi2Report, Estimate, GapBounds, GaussAcceptReport, HeavyTailFloor, McConductance,
    PinskerReport, Potential, RwmRegime, RwmSpec, SetDescriptor, GAUSS_KAPPA_COEF,
    RWM_GAP_COEF, RWM_KAPPA_COEF, RWM_VARSIGMA_MAX,
};
