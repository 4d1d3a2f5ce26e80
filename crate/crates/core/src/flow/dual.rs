//! The singular-time cusp and the flow past it as a graph over the dual cylinder.
//!
//! After the neck pinches, the surface near the singular point is
//! `{(x, y) : |y| = w(|x|)}` with `x ∈ R^m`, `m = n - k + 1`. In this form
//!
//! `w_t = w''/(1 + w'^2) + (m - 1) w'/s - (k - 1)/w`,
//!
//! and the outward normal satisfies `ν·(0, y) < 0` exactly where `w' > 0`.

use super::profile::{CoordinateKind, RadialProfile, TimeStamp};
use super::stepper::{step, RadialOperator, Reaction, TimeScheme};
use crate::cylinder::CylinderParams;
use crate::error::{domain, Error, Result};

/// Upper end of the range where the cusp model is used, `e^{-1}`.
pub const CUSP_Y_MAX: f64 = 0.367_879_441_171_442_33;

/// Leading singular-time profile `rho |y| / (2 sqrt(-log |y|))` for `0 < |y| < 1`.
pub fn cusp_profile(y: f64, params: &CylinderParams) -> Result<f64> {
    let a = y.abs();
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("cusp profile needs 0 < |y| < 1, got {y}"));
    }
    Ok(params.rho() * a / (2.0 * (-a.ln()).sqrt()))
}

/// Solve `cusp_profile(y) = s` for `y` in `(0, e^{-1}]` by bisection.
pub fn inverse_cusp(s: f64, params: &CylinderParams) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let top = cusp_profile(CUSP_Y_MAX, params)?;
    if !(s > 0.0 && s <= top) {
        return domain(format!("inverse cusp needs 0 <= s <= {top}, got {s}"));
    }
    let (mut lo, mut hi) = (0.0f64, CUSP_Y_MAX);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cusp_profile(mid, params)? < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Unrescaled neck data at `t = -e^{-tau0}`:
/// `v = rho sqrt(e^{-tau0} + (y^2 - 2k e^{-tau0})/(2 tau0))` on a radial grid.
pub fn neckpinch_initial(
    params: &CylinderParams,
    tau0: f64,
    extent: f64,
    points: usize,
) -> Result<RadialProfile> {
    let k = params.k() as f64;
    if !(tau0 > k) {
        return Err(Error::OutOfRegime(format!(
            "tau0 = {tau0} must exceed k = {k}"
        )));
    }
    let scale = (-tau0).exp();
    let rho = params.rho();
    RadialProfile::from_fn(
        *params,
        CoordinateKind::Radial,
        extent,
        points,
        TimeStamp::Flow(-scale),
        |y| rho * (scale + (y * y - 2.0 * k * scale) / (2.0 * tau0)).sqrt(),
    )
}

/// Height `w >= 0` over the radial coordinate `s = |x|` of `R^{n-k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualProfile {
    params: CylinderParams,
    h: f64,
    values: Vec<f64>,
    time: f64,
}

impl DualProfile {
    pub fn new(params: CylinderParams, h: f64, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() < 4 || !(h > 0.0) {
            return domain("dual profile needs at least 4 samples and positive spacing");
        }
        if values.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return domain("dual heights must be finite and non-negative");
        }
        if params.k() >= 2 && values.iter().any(|w| *w <= 0.0) {
            return domain("dual heights must be positive when k >= 2");
        }
        Ok(Self {
            params,
            h,
            values,
            time,
        })
    }

    pub fn from_fn(
        params: CylinderParams,
        extent: f64,
        points: usize,
        time: f64,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if points < 4 {
            return domain("dual profile needs at least 4 samples");
        }
        let h = extent / (points - 1) as f64;
        Self::new(
            params,
            h,
            (0..points).map(|i| f(i as f64 * h)).collect(),
            time,
        )
    }

    /// The inverted cusp on `s ∈ [0, cusp(e^{-1})]` at `t = 0`.
    pub fn from_cusp(params: CylinderParams, points: usize) -> Result<Self> {
        let top = cusp_profile(CUSP_Y_MAX, &params)?;
        Self::from_fn(params, top, points, 0.0, |s| {
            inverse_cusp(s.min(top), &params).unwrap_or(0.0)
        })
    }

    pub fn params(&self) -> &CylinderParams {
        &self.params
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.h
    }
}

/// `ν·(0, y) < 0` on the sampled half: `w` strictly increasing in `s`.
pub fn normal_sign_condition(w: &DualProfile) -> bool {
    w.values.windows(2).all(|p| p[1] > p[0])
}

/// Result of one post-singular step.
#[derive(Debug, Clone, PartialEq)]
pub struct DualStep {
    pub profile: DualProfile,
    /// Whether the stepped profile keeps strict monotonicity.
    pub monotone: bool,
}

/// One step of the dual graph flow. The outer end is held fixed and `s = 0`
/// uses an even ghost.
pub fn post_singular_step(w: &DualProfile, dt: f64, scheme: TimeScheme) -> Result<DualStep> {
    if !(dt > 0.0) {
        return domain("time step must be positive");
    }
    let n = w.values.len();
    let mut fixed = vec![false; n];
    fixed[n - 1] = true;
    let k = w.params.k();
    let op = RadialOperator {
        start: 0.0,
        h: w.h,
        radial: true,
        p: (w.params.sphere_dim()) as f64,
        q: 0.0,
        quasilinear: true,
        reaction: if k >= 2 {
            Some(Reaction::Inverse { c: k as f64 - 1.0 })
        } else {
            None
        },
        fixed,
    };
    let values = step(&op, &w.values, dt, scheme)?;
    if let Some(i) = values
        .iter()
        .position(|x| *x < 0.0 || (k >= 2 && *x <= 0.0))
    {
        return Err(Error::DegenerateGraph {
            value: values[i],
            location: w.coordinate(i),
        });
    }
    let profile = DualProfile {
        values,
        time: w.time + dt,
        ..w.clone()
    };
    let monotone = normal_sign_condition(&profile);
    Ok(DualStep { profile, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_examples() {
        let p = CylinderParams::new(2, 1).unwrap();
        assert!((cusp_profile(0.05, &p).unwrap() - 0.020427).abs() < 5e-7);
        assert!(cusp_profile(1e-12, &p).unwrap() < 1e-12);
        assert!(cusp_profile(1.0, &p).is_err());
        let y = 0.0731;
        let s = cusp_profile(y, &p).unwrap();
        assert!((inverse_cusp(s, &p).unwrap() - y).abs() < 1e-14);
        assert!((s * 2.0 * (-y.ln()).sqrt() / (p.rho() * y) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperplane_is_stationary() {
        let p = CylinderParams::new(2, 1).unwrap();
        let w = DualProfile::from_fn(p, 1.0, 50, 0.0, |_| 0.3).unwrap();
        let next = post_singular_step(&w, 1e-3, TimeScheme::Ros2).unwrap();
        assert_eq!(next.profile.values(), w.values());
        assert!(!next.monotone);
    }

    #[test]
    fn inverted_cusp_is_increasing() {
        let p = CylinderParams::new(2, 1).unwrap();
        let w = DualProfile::from_cusp(p, 400).unwrap();
        assert!(normal_sign_condition(&w));
        assert_eq!(w.values()[0], 0.0);
    }
}
