//! Quadrature over sampled profiles.

use crate::flow::{CoordinateKind, RadialProfile};

/// Integral of the piecewise-linear interpolant of `f` over `[lo, hi]`
/// intersected with the grid. Cells cut by the window contribute partially.
pub(crate) fn window_integral(coords: &[f64], f: &[f64], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..coords.len().saturating_sub(1) {
        let (a, b) = (coords[i], coords[i + 1]);
        let (l, r) = (a.max(lo), b.min(hi));
        if r <= l {
            continue;
        }
        let at = |x: f64| f[i] + (f[i + 1] - f[i]) * (x - a) / (b - a);
        total += 0.5 * (r - l) * (at(l) + at(r));
    }
    total
}

/// Measure factor of the `y` directions: `|S^{k-1}| r^{k-1}` on radial grids
/// (two half-lines when `k = 1`), `1` on axis grids.
pub(crate) fn spine_factor(profile: &RadialProfile, s: f64) -> f64 {
    match profile.kind() {
        CoordinateKind::Axis => 1.0,
        CoordinateKind::Radial => {
            let k = profile.params().k();
            crate::cylinder::unit_sphere_area(k - 1) * s.abs().powi(k as i32 - 1)
        }
    }
}

/// Area element of `{|x| = v(y)}` per unit reduced coordinate:
/// `|S^{n-k}| v^{n-k} sqrt(1 + v'^2)` times the spine factor.
pub(crate) fn area_elements(profile: &RadialProfile) -> Vec<f64> {
    let d = profile.params().sphere_dim();
    let omega = crate::cylinder::unit_sphere_area(d);
    let dv = profile.derivative();
    profile
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            omega
                * v.powi(d as i32)
                * (1.0 + dv[i] * dv[i]).sqrt()
                * spine_factor(profile, profile.coordinate(i))
        })
        .collect()
}

/// Window of the reduced coordinate: the whole grid or `|y| <= radius`.
pub(crate) fn window(profile: &RadialProfile, radius: Option<f64>) -> (f64, f64) {
    let r = radius.unwrap_or(f64::INFINITY);
    match profile.kind() {
        CoordinateKind::Axis => (-r, r),
        CoordinateKind::Radial => (0.0, r),
    }
}

/// `∫ f(v, y) dμ` over the profile, restricted to `|y| <= radius` and `v <= radius`.
pub(crate) fn profile_integral(
    profile: &RadialProfile,
    radius: Option<f64>,
    f: impl Fn(f64, f64) -> f64,
) -> f64 {
    let area = area_elements(profile);
    let coords = profile.coordinates();
    let cap = radius.unwrap_or(f64::INFINITY);
    let vals: Vec<f64> = profile
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if *v <= cap {
                f(*v, coords[i]) * area[i]
            } else {
                0.0
            }
        })
        .collect();
    let (lo, hi) = window(profile, radius);
    window_integral(&coords, &vals, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_cells() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let f = [0.0, 1.0, 2.0, 3.0];
        assert!((window_integral(&x, &f, 0.0, 2.5) - 3.125).abs() < 1e-15);
        assert!((window_integral(&x, &f, 0.5, 1.0) - 0.375).abs() < 1e-15);
        assert_eq!(window_integral(&x, &f, 5.0, 6.0), 0.0);
    }
}
