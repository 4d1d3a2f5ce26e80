//! Quantities measured along flows: Gaussian area and entropy, the weighted
//! distance to the cylinder and its decay order, mode content of graphs,
//! unit-step monotonicity verdicts, the noncollapsing constant and the Euler
//! characteristic bookkeeping of surgery.

mod decay;
mod distance;
mod gaussian;
mod modes;
mod noncollapse;
mod surgery;
mod sweep;
mod weights;

pub use decay::{
    decay_order, nonconcentration_check, restricted_decay_fit, DecaySeries, NonconcentrationReport,
    RestrictedFit,
};
pub use distance::{
    concentration_integral, l2_distance, weighted_mass, Distance, DISTANCE_TAIL_TOLERANCE,
};
pub use gaussian::{
    entropy_lower_bound, gaussian_area, EntropyEstimate, EntropySearch, GaussianArea, Surface,
    TAIL_TOLERANCE,
};
pub use modes::{h1_domination, mode_fraction, mode_fraction_with};
pub use noncollapse::{noncollapse_alpha, GeneratingCurve, NoncollapseReport};
pub use surgery::{sphere_euler, surgery_euler_delta};
pub use sweep::{
    classify_series, monotonicity_sweep, threshold_failures, StepVerdict, SweepConfig, SweepReport,
    SweepSummary, Verdict,
};

use crate::error::Result;
use crate::flow::FlowTrace;
use crate::par::Execution;

/// Fill in `distance` (rescaled runs) and `alpha` (mean-convex samples) on
/// every record that has a stored profile. `alpha` uses the points with
/// `|y| <= window`.
pub fn annotate_trace(trace: &mut FlowTrace, window: f64, exec: Execution) -> Result<()> {
    if trace.profiles.len() != trace.records.len() {
        return Ok(());
    }
    for (rec, p) in trace.records.iter_mut().zip(&trace.profiles) {
        if trace.rescaled {
            rec.distance = Some(l2_distance(p, None)?.value);
        }
        rec.alpha = if rec.mean_convex {
            Some(noncollapse_alpha(&GeneratingCurve::from_profile(p, window)?, exec)?.alpha)
        } else {
            None
        };
    }
    Ok(())
}
