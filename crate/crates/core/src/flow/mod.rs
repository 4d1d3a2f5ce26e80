//! Symmetric-reduction flows: rescaled and unrescaled mean curvature flow of
//! rotationally symmetric profiles, Jacobi fields, the dual graph past a
//! singularity, closed spheres and the bowl translator.

mod bowl;
mod dual;
mod profile;
mod sphere;
mod stepper;
mod steppers;
mod trace;

pub use bowl::{bowl_series, bowl_translator_solve, tail_exponent, BowlProfile};
pub use dual::{
    cusp_profile, inverse_cusp, neckpinch_initial, normal_sign_condition, post_singular_step,
    DualProfile, DualStep, CUSP_Y_MAX,
};
pub use profile::{CoordinateKind, RadialProfile, TimeStamp};
pub use sphere::{polar_mcf_step, run_polar, PolarProfile, SphereRun};
pub use stepper::TimeScheme;
pub use steppers::{
    homothetic_boundary_value, homothetic_profile, jacobi_step, mcf_step, mcf_step_dt,
    nondegenerate_initial, rmcf_residual, rmcf_step, BoundaryMode, JacobiGrid, StepperConfig,
    DEGENERATE_RADIUS, GRAPH_REGIME, MIN_TAU0,
};
pub use trace::{
    detect_pinch, run_flow, FlowTrace, PinchEstimate, PinchStatus, RunOptions, Termination,
    TraceRecord,
};
