//! Discrete noncollapsing constant of a rotationally symmetric hypersurface.
//!
//! A point of the hypersurface is `(a θ, b ŷ)` with `θ ∈ S^d` and `ŷ ∈ S^{k-1}`.
//! For a second point `(a' θ', b' ŷ')`, both `⟨p - q, n⟩` and `|p - q|^2` are
//! affine in `cos∠(θ, θ')` and `cos∠(ŷ, ŷ')`, so their ratio is extremal at the
//! corners `±1` of the admissible square. The scan is therefore over pairs of
//! curve points and at most four corners.

use crate::error::{domain, Error, Result};
use crate::flow::{CoordinateKind, PolarProfile, RadialProfile};
use crate::par::Execution;

/// Generating curve of a symmetric hypersurface.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingCurve {
    /// Dimension of the sphere factor carried by `a`.
    pub sphere_dim: usize,
    /// Number of spine directions carried by `b`.
    pub spine_dim: usize,
    /// Whether `b` is a radius (`ŷ` may rotate or reflect) or a signed coordinate.
    pub spine_rotates: bool,
    /// `(a, b)` per point, `a > 0`.
    pub points: Vec<(f64, f64)>,
    /// Outward unit normals in the `(a, b)` plane.
    pub normals: Vec<(f64, f64)>,
    /// Mean curvature per point.
    pub mean_curvature: Vec<f64>,
}

impl GeneratingCurve {
    /// Points of a profile with `|y| <= window`.
    pub fn from_profile(profile: &RadialProfile, window: f64) -> Result<Self> {
        let params = profile.params();
        let dv = profile.derivative();
        let h = profile.mean_curvature();
        let mut curve = Self {
            sphere_dim: params.sphere_dim(),
            spine_dim: params.k(),
            spine_rotates: profile.kind() == CoordinateKind::Radial,
            points: Vec::new(),
            normals: Vec::new(),
            mean_curvature: Vec::new(),
        };
        for (i, v) in profile.values().iter().enumerate() {
            let y = profile.coordinate(i);
            if y.abs() > window {
                continue;
            }
            let g = (1.0 + dv[i] * dv[i]).sqrt();
            curve.points.push((*v, y));
            curve.normals.push((1.0 / g, -dv[i] / g));
            curve.mean_curvature.push(h[i]);
        }
        if curve.points.len() < 2 {
            return domain("window holds fewer than two profile points");
        }
        Ok(curve)
    }

    /// Closed curve of a polar profile: the axis is the signed spine.
    pub fn from_polar(profile: &PolarProfile) -> Self {
        let swap = |v: Vec<(f64, f64)>| v.into_iter().map(|(a, b)| (b, a)).collect();
        Self {
            sphere_dim: profile.dimension() - 1,
            spine_dim: 1,
            spine_rotates: false,
            points: swap(profile.points()),
            normals: swap(profile.normals()),
            mean_curvature: profile.mean_curvature(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoncollapseReport {
    /// `sup_q Z(p, q)` per point.
    pub z_sup: Vec<f64>,
    /// `inf_q Z(p, q)` per point.
    pub z_inf: Vec<f64>,
    pub h_min: f64,
    pub alpha: f64,
    /// Point realising `alpha`.
    pub argmin: usize,
}

fn corners(curve: &GeneratingCurve) -> Vec<(f64, f64)> {
    let mut c = vec![(1.0, 1.0)];
    if curve.sphere_dim >= 1 {
        c.push((-1.0, 1.0));
    }
    if curve.spine_rotates {
        c.push((1.0, -1.0));
        if curve.sphere_dim >= 1 {
            c.push((-1.0, -1.0));
        }
    }
    c
}

/// `α = inf_p H(p) / max(sup_q Z, -inf_q Z)` with `Z = 2⟨p - q, n(p)⟩ / |p - q|^2`.
pub fn noncollapse_alpha(curve: &GeneratingCurve, exec: Execution) -> Result<NoncollapseReport> {
    if let Some((index, h)) = curve
        .mean_curvature
        .iter()
        .enumerate()
        .find(|(_, h)| !(**h > 0.0))
        .map(|(i, h)| (i, *h))
    {
        return Err(Error::NotMeanConvex { index, h });
    }
    let pts = &curve.points;
    let corners = corners(curve);
    let scan = exec.map_range(pts.len(), |i| {
        let (a, b) = pts[i];
        let (na, nb) = curve.normals[i];
        let mut sup = f64::NEG_INFINITY;
        let mut inf = f64::INFINITY;
        for (j, &(a2, b2)) in pts.iter().enumerate() {
            for &(c1, c2) in &corners {
                if j == i && c1 > 0.0 && c2 > 0.0 {
                    continue;
                }
                let dist =
                    a * a + a2 * a2 - 2.0 * a * a2 * c1 + b * b + b2 * b2 - 2.0 * b * b2 * c2;
                if !(dist > 0.0) {
                    continue;
                }
                let z = 2.0 * (na * (a - a2 * c1) + nb * (b - b2 * c2)) / dist;
                sup = sup.max(z);
                inf = inf.min(z);
            }
        }
        (sup, inf)
    });
    let (z_sup, z_inf): (Vec<f64>, Vec<f64>) = scan.into_iter().unzip();
    let mut alpha = f64::INFINITY;
    let mut argmin = 0;
    for i in 0..pts.len() {
        let a = curve.mean_curvature[i] / z_sup[i].max(-z_inf[i]);
        if a < alpha {
            alpha = a;
            argmin = i;
        }
    }
    let h_min = curve
        .mean_curvature
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(NoncollapseReport {
        z_sup,
        z_inf,
        h_min,
        alpha,
        argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::TimeStamp;
    use crate::CylinderParams;

    #[test]
    fn sphere_is_n_noncollapsed() {
        for n in [2, 3, 5] {
            let s = PolarProfile::sphere(n, 1.7, 200).unwrap();
            let r =
                noncollapse_alpha(&GeneratingCurve::from_polar(&s), Execution::Sequential).unwrap();
            assert!(
                (r.alpha - n as f64).abs() < 1e-6 * n as f64,
                "{n}: {}",
                r.alpha
            );
        }
    }

    #[test]
    fn cylinder_and_concavity() {
        let p = CylinderParams::new(3, 1).unwrap();
        let cyl = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            10.0,
            401,
            TimeStamp::Rescaled(0.0),
            |_| p.rho(),
        )
        .unwrap();
        let curve = GeneratingCurve::from_profile(&cyl, 10.0).unwrap();
        let r = noncollapse_alpha(&curve, Execution::Sequential).unwrap();
        assert!((r.alpha - 2.0).abs() < 1e-12);
        let q = CylinderParams::new(2, 1).unwrap();
        let neck = RadialProfile::from_fn(
            q,
            CoordinateKind::Axis,
            1.0,
            61,
            TimeStamp::Flow(0.0),
            |y| 0.2 + 5.0 * y * y,
        )
        .unwrap();
        let err = noncollapse_alpha(
            &GeneratingCurve::from_profile(&neck, 1.0).unwrap(),
            Execution::Sequential,
        );
        assert!(matches!(err, Err(Error::NotMeanConvex { .. })));
    }
}
