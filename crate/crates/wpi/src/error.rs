use thiserror::Error;

/// Errors across the rate calculus, finite-chain engine and constructors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("beta does not vanish at infinity (gamma stalls at {floor})")]
    NonVanishingGamma { floor: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("shape violation: {0}")]
    ShapeViolation(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("sieves are incomparable: {0} vs {1}")]
    IncomparableSieves(String, String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("state {0} has zero stationary mass")]
    ZeroMassState(usize),

    #[error("kernel is not reversible (detailed-balance residual {residual:.3e})")]
    NotReversible { residual: f64 },

    #[error("centered observable still loads on the unit eigenvalue (mass {0:.3e})")]
    MassAtOne(f64),

    #[error("exhaustive enumeration limited to {max} states, got {got}")]
    TooLarge { max: usize, got: usize },

    #[error("conductance vanishes: {0}")]
    ZeroConductance(String),

    #[error("empty restriction")]
    EmptyRestriction,

    #[error("drift condition violated at state {state} (slack {slack:.3e})")]
    DriftViolated { state: usize, slack: f64 },

    #[error("minorization fails at row {row} (available overlap {available:.3e})")]
    MinorizationFails { row: usize, available: f64 },

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("bracket violation: {0}")]
    BracketViolation(String),

    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("bad support: {0}")]
    BadSupport(String),

    #[error("zero function")]
    ZeroFunction,

    #[error("range error: {0}")]
    RangeError(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
