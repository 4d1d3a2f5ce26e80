//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures reported by the geometry, spectral, flow and diagnostic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A graph function reaches `u <= -rho`, so the graph is not embedded.
    #[error("degenerate graph: u = {value} at y = {location}")]
    DegenerateGraph { value: f64, location: f64 },

    /// Input is outside the regime in which the operation is meaningful.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// A quantity is not defined for the given input (for example a zero norm).
    #[error("undefined: {0}")]
    Undefined(String),

    /// The profile reached (or came too close to) zero radius.
    #[error("pinch: min radius {min_v} at {location}")]
    Pinch { min_v: f64, location: f64 },

    /// The time step violates the stability bound of the linearised scheme.
    #[error("step rejected: dt = {dt} exceeds stability bound, try {suggested}")]
    StepRejected { dt: f64, suggested: f64 },

    /// Too few grid points for the requested discretisation.
    #[error("grid too coarse: {points} points, need at least {minimum}")]
    GridTooCoarse { points: usize, minimum: usize },

    /// Mean curvature is not positive somewhere on the surface.
    #[error("not mean convex: H = {h} at point {index}")]
    NotMeanConvex { index: usize, h: f64 },

    /// An iterative method failed to converge.
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
