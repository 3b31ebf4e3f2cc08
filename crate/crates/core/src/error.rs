use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} lies inside the excluded set of {set}")]
    SingularPoint { set: &'static str, point: [f64; 4] },

    #[error("state at the origin: r = 0 is excluded")]
    AtOrigin,

    #[error("trajectory entered the origin exclusion radius {r_min:e} at t = {t}")]
    OriginApproach { t: f64, r_min: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("angular grid too coarse: n_theta = {n_theta}, at least {required} needed")]
    GridTooCoarse { n_theta: usize, required: usize },

    #[error("configuration is not a solution: residual {residual:e} exceeds {threshold:e}")]
    NotASolution { residual: f64, threshold: f64 },

    #[error("phase factor sqrt(eta^dagger xi / xi^dagger eta) is undefined for this configuration")]
    UndefinedPhase,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}
