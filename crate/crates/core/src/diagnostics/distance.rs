//! Weighted distance to the cylinder.
//!
//! `d(Σ)^2 = ∫_Σ odist^2 e^{-|X|^2/4}` with `odist = chi(|x| - rho)`. No
//! `(4π)^{-n/2}` factor is applied. Restricted variants integrate over the
//! box `Q_R = {|x| <= R, |y| <= R}`.

use super::weights::{profile_integral, spine_factor};
use crate::cylinder::{chi_eval, unit_sphere_area};
use crate::error::Result;
use crate::flow::{CoordinateKind, RadialProfile};
use crate::quadrature::GaussLegendre;

/// Relative tail mass above which a distance is flagged.
pub const DISTANCE_TAIL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub value: f64,
    /// `Some(R)` for the box-restricted variant.
    pub radius: Option<f64>,
    /// Estimated squared mass beyond the grid (full variant only).
    pub tail: f64,
    pub truncation_warning: bool,
}

fn weight(v: f64, y: f64) -> f64 {
    (-(v * v + y * y) / 4.0).exp()
}

/// Squared-mass estimate beyond the grid, continuing the end values as cylinders.
fn tail_sq(profile: &RadialProfile, f: impl Fn(f64, f64) -> f64) -> f64 {
    let d = profile.params().sphere_dim();
    let omega = unit_sphere_area(d);
    let gl = GaussLegendre::new(16);
    let ends: Vec<(f64, f64, f64)> = match profile.kind() {
        CoordinateKind::Axis => vec![
            (profile.values()[0], profile.coordinate(0), -1.0),
            (
                profile.values()[profile.len() - 1],
                profile.coordinate(profile.len() - 1),
                1.0,
            ),
        ],
        CoordinateKind::Radial => {
            vec![(profile.values()[profile.len() - 1], profile.extent(), 1.0)]
        }
    };
    ends.into_iter()
        .map(|(v, edge, dir)| {
            omega
                * v.powi(d as i32)
                * gl.integrate(
                    |t| {
                        let y = edge + dir * t;
                        spine_factor(profile, y) * f(v, y)
                    },
                    0.0,
                    40.0,
                    80,
                )
        })
        .sum()
}

/// `d(Σ)`, or its restriction to `Q_R` when `radius` is given.
pub fn l2_distance(profile: &RadialProfile, radius: Option<f64>) -> Result<Distance> {
    let rho = profile.params().rho();
    let f = |v: f64, y: f64| chi_eval(v - rho).powi(2) * weight(v, y);
    let sq = profile_integral(profile, radius, f);
    let tail = if radius.is_some() {
        0.0
    } else {
        tail_sq(profile, f)
    };
    let total = sq + tail;
    Ok(Distance {
        value: total.max(0.0).sqrt(),
        radius,
        tail,
        truncation_warning: total > 0.0 && tail / total > DISTANCE_TAIL_TOLERANCE,
    })
}

/// Total weighted mass `∫_Σ e^{-|X|^2/4}`, the saturation level of `d^2`.
pub fn weighted_mass(profile: &RadialProfile, radius: Option<f64>) -> f64 {
    profile_integral(profile, radius, weight)
        + if radius.is_some() {
            0.0
        } else {
            tail_sq(profile, weight)
        }
}

/// `∫_Σ odist^2 (1 + tau |X|^2) e^{-|X|^2/4}`.
pub fn concentration_integral(profile: &RadialProfile, tau: f64) -> f64 {
    let rho = profile.params().rho();
    let f =
        |v: f64, y: f64| chi_eval(v - rho).powi(2) * (1.0 + tau * (v * v + y * y)) * weight(v, y);
    profile_integral(profile, None, f) + tail_sq(profile, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::TimeStamp;
    use crate::CylinderParams;

    fn flat(p: CylinderParams, kind: CoordinateKind, v: f64) -> RadialProfile {
        RadialProfile::from_fn(p, kind, 14.0, 1401, TimeStamp::Rescaled(0.0), |_| v).unwrap()
    }

    #[test]
    fn examples() {
        for (n, k) in [(2, 1), (4, 2)] {
            let p = CylinderParams::new(n, k).unwrap();
            let kind = if k == 1 {
                CoordinateKind::Axis
            } else {
                CoordinateKind::Radial
            };
            let zero = l2_distance(&flat(p, kind, p.rho()), None).unwrap();
            assert!(zero.value < 1e-10);
            let eps = 1e-3;
            let near = flat(p, kind, p.rho() + eps);
            let d = l2_distance(&near, None).unwrap().value;
            let want = eps * weighted_mass(&flat(p, kind, p.rho()), None).sqrt();
            assert!((d / want - 1.0).abs() < 0.01);
            let far = flat(p, kind, p.rho() + 5.0);
            let d = l2_distance(&far, None).unwrap().value;
            assert!((d - weighted_mass(&far, None).sqrt()).abs() < 1e-12 * d.max(1e-300));
        }
    }

    #[test]
    fn restriction_grows_to_full() {
        let p = CylinderParams::new(2, 1).unwrap();
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Radial,
            14.0,
            1401,
            TimeStamp::Rescaled(0.0),
            |r| p.rho() + 0.01 * (r * r - 2.0),
        )
        .unwrap();
        let full = l2_distance(&prof, None).unwrap().value;
        let mut prev = 0.0;
        for r in [1.5, 2.5, 4.0, 8.0, 13.0] {
            let d = l2_distance(&prof, Some(r)).unwrap().value;
            assert!(d > prev && d <= full + 1e-15);
            prev = d;
        }
        assert!((prev - full).abs() < 1e-10 * full);
    }
}
