//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar input violated its domain restriction.
    #[error("parameter `{name}` must satisfy {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Frequency-side kernels are undefined at ξ' = 0.
    #[error("operation undefined at the zero frequency")]
    SingularFrequency,

    /// `require_zero_mean` was requested but the zero mode is not negligible.
    #[error("zero-mode magnitude {magnitude:.3e} exceeds the allowed {limit:.3e}")]
    ZeroModeViolation { magnitude: f64, limit: f64 },

    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid obstacle problem: {0}")]
    InvalidObstacleProblem(String),

    /// The obstacle pokes above zero on the pinned collar.
    #[error("infeasible obstacle: psi = {max_psi:.3e} > 0 on collar node {node}")]
    InfeasibleObstacle { max_psi: f64, node: usize },

    #[error("cutoff radii must satisfy 0 < inner < outer <= L/2, got inner {inner}, outer {outer}")]
    InvalidCutoff { inner: f64, outer: f64 },

    /// Strip meshes must keep the vertical spacing no coarser than the
    /// tangential one.
    #[error("strip mesh violates dt <= h: dt = {dt}, h = {h}")]
    MeshAnisotropy { dt: f64, h: f64 },

    #[error("polar angle {theta} outside [0, pi]")]
    ThetaOutOfRange { theta: f64 },

    #[error("radius {radius} below twice the grid spacing {spacing}; unresolvable")]
    UnresolvableRadius { radius: f64, spacing: f64 },

    #[error("invalid fit request: {0}")]
    InvalidFitRequest(String),
}
