use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be 1 or 2, got {0}")]
    InvalidDimension(usize),

    #[error("points per axis must be a power of two and at least 16, got {0}")]
    InvalidGridSize(usize),

    #[error("box length must be positive and finite, got {0}")]
    InvalidBoxLength(f64),

    #[error("expected {expected} grid values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("the grid resolves no dyadic frequency level (N_max < 1)")]
    EmptyLadder,

    #[error("dyadic level {0} is not on the ladder")]
    LevelNotOnLadder(u32),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("non-integer power sigma = {0} cannot be de-aliased exactly under the strict policy")]
    AliasingUnavoidable(f64),

    #[error("solution became non-finite at t = {t}")]
    Blowup { t: f64 },

    #[error("time step {dt} does not divide the dispersion period scale eps = {eps}")]
    MisalignedStep { dt: f64, eps: f64 },

    #[error(
        "pair (q, r) = ({q}, {r}) is not admissible in d = {dim}: need 2/q = d(1/2 - 1/r), \
         q, r >= 2, and (d, q, r) != (2, 2, inf)"
    )]
    Inadmissible { q: f64, r: f64, dim: usize },

    #[error("initial L2 norm {norm} exceeds the configured smallness {limit}")]
    NotSmall { norm: f64, limit: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
