//! Rotationally symmetric mean curvature flow near generalised cylinders.
//!
//! The crate is organised bottom-up:
//!
//! * [`cylinder`]: cylinder parameters, the distance cutoff and graph geometry.
//! * [`spectral`]: eigenfunctions of the Jacobi operator, projections and the
//!   linear heat semigroup.
//! * [`flow`]: time steppers for the rescaled and unrescaled flows, initial
//!   data, pinch detection, the post-singular graph flow and the bowl ODE.
//! * [`diagnostics`]: Gaussian area, the weighted distance to the cylinder,
//!   decay orders, monotonicity sweeps and the noncollapsing constant.
//!
//! [`linalg`], [`quadrature`] and [`par`] hold the numerical plumbing.

// `!(x > 0.0)` is the intended guard: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cylinder;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod par;
pub mod quadrature;
pub mod spectral;

pub use cylinder::{chi_eval, make_cylinder, odist, ChiCutoff, CylinderParams, GraphPatch};
pub use error::{Error, Result};
pub use par::Execution;
