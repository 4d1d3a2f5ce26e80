//! Sampled radius functions `v` describing hypersurfaces `{|x| = v(y)}`.

use crate::cylinder::{CylinderParams, GraphPatch};
use crate::error::{domain, Result};

/// Coordinate carried by a profile grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoordinateKind {
    /// `k = 1`, signed axis coordinate `y` on `[-L, L]`.
    Axis,
    /// `r = |y|` on `[0, R]`, even through `r = 0`.
    Radial,
}

/// Flow time `t` or rescaled time `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStamp {
    Flow(f64),
    Rescaled(f64),
}

impl TimeStamp {
    pub fn value(self) -> f64 {
        match self {
            TimeStamp::Flow(t) | TimeStamp::Rescaled(t) => t,
        }
    }

    pub fn is_rescaled(self) -> bool {
        matches!(self, TimeStamp::Rescaled(_))
    }

    pub(crate) fn advanced(self, dt: f64) -> Self {
        match self {
            TimeStamp::Flow(t) => TimeStamp::Flow(t + dt),
            TimeStamp::Rescaled(t) => TimeStamp::Rescaled(t + dt),
        }
    }

    pub(crate) fn with_value(self, v: f64) -> Self {
        match self {
            TimeStamp::Flow(_) => TimeStamp::Flow(v),
            TimeStamp::Rescaled(_) => TimeStamp::Rescaled(v),
        }
    }
}

/// Radius function on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    params: CylinderParams,
    kind: CoordinateKind,
    h: f64,
    values: Vec<f64>,
    time: TimeStamp,
}

impl RadialProfile {
    /// Build from samples. Axis grids are centred at `y = 0`; radial grids start at `r = 0`.
    pub fn new(
        params: CylinderParams,
        kind: CoordinateKind,
        h: f64,
        values: Vec<f64>,
        time: TimeStamp,
    ) -> Result<Self> {
        if kind == CoordinateKind::Axis && params.k() != 1 {
            return domain("axis profiles require k = 1");
        }
        if values.len() < 4 || !(h > 0.0) {
            return domain("profile needs at least 4 samples and positive spacing");
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v <= 0.0) {
            return domain(format!(
                "radius must be positive and finite, got {} at sample {i}",
                values[i]
            ));
        }
        Ok(Self {
            params,
            kind,
            h,
            values,
            time,
        })
    }

    /// Sample `f` on `[-extent, extent]` (axis) or `[0, extent]` (radial).
    pub fn from_fn(
        params: CylinderParams,
        kind: CoordinateKind,
        extent: f64,
        points: usize,
        time: TimeStamp,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if points < 4 || !(extent > 0.0) {
            return domain("profile needs at least 4 points and a positive extent");
        }
        let h = match kind {
            CoordinateKind::Axis => 2.0 * extent / (points - 1) as f64,
            CoordinateKind::Radial => extent / (points - 1) as f64,
        };
        let start = if kind == CoordinateKind::Axis {
            -extent
        } else {
            0.0
        };
        let values = (0..points).map(|i| f(start + i as f64 * h)).collect();
        Self::new(params, kind, h, values, time)
    }

    pub(crate) fn with_values(&self, values: Vec<f64>, time: TimeStamp) -> Self {
        Self {
            params: self.params,
            kind: self.kind,
            h: self.h,
            values,
            time,
        }
    }

    pub fn params(&self) -> &CylinderParams {
        &self.params
    }

    pub fn kind(&self) -> CoordinateKind {
        self.kind
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self) -> TimeStamp {
        self.time
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Half-width of an axis grid or radius of a radial grid.
    pub fn extent(&self) -> f64 {
        match self.kind {
            CoordinateKind::Axis => 0.5 * (self.len() - 1) as f64 * self.h,
            CoordinateKind::Radial => (self.len() - 1) as f64 * self.h,
        }
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        match self.kind {
            CoordinateKind::Axis => -self.extent() + i as f64 * self.h,
            CoordinateKind::Radial => i as f64 * self.h,
        }
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.coordinate(i)).collect()
    }

    /// Index and value of the smallest radius.
    pub fn min(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            )
    }

    /// First derivative at every node (even reflection at `r = 0`, one-sided at outer ends).
    pub fn derivative(&self) -> Vec<f64> {
        derivative(&self.values, self.h, self.kind == CoordinateKind::Radial)
    }

    /// Second derivative at every node.
    pub fn second_derivative(&self) -> Vec<f64> {
        second_derivative(&self.values, self.h, self.kind == CoordinateKind::Radial)
    }

    /// Mean curvature with respect to the normal pointing away from the spine.
    pub fn mean_curvature(&self) -> Vec<f64> {
        let d1 = self.derivative();
        let d2 = self.second_derivative();
        let nk = self.params.sphere_dim() as f64;
        let km1 = self.params.k() as f64 - 1.0;
        (0..self.len())
            .map(|i| {
                let v = self.values[i];
                let g = (1.0 + d1[i] * d1[i]).sqrt();
                let mut h = -d2[i] / (g * g * g) + nk / (v * g);
                if self.kind == CoordinateKind::Radial && km1 > 0.0 {
                    let r = self.coordinate(i);
                    h -= if i == 0 {
                        km1 * d2[0]
                    } else {
                        km1 * d1[i] / (r * g)
                    };
                }
                h
            })
            .collect()
    }

    /// Graph heights `u = v - rho` over the cylinder.
    pub fn graph_heights(&self) -> Vec<f64> {
        let rho = self.params.rho();
        self.values.iter().map(|v| v - rho).collect()
    }

    /// The profile as a graph patch over the cylinder.
    pub fn to_patch(&self) -> Result<GraphPatch> {
        let u = self.graph_heights();
        match self.kind {
            CoordinateKind::Axis => GraphPatch::line(self.params, -self.extent(), self.h, u),
            CoordinateKind::Radial => GraphPatch::radial(self.params, self.h, u),
        }
    }

    /// Linear interpolation of `v` at a coordinate inside the grid.
    pub fn interpolate(&self, s: f64) -> Option<f64> {
        let start = self.coordinate(0);
        let t = (s - start) / self.h;
        if t < -1e-12 || t > (self.len() - 1) as f64 + 1e-12 {
            return None;
        }
        let i = (t.floor().max(0.0) as usize).min(self.len() - 2);
        let w = t - i as f64;
        Some(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }
}

pub(crate) fn derivative(v: &[f64], h: f64, even_left: bool) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                if even_left {
                    0.0
                } else {
                    (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
                }
            } else if i == n - 1 {
                (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

pub(crate) fn second_derivative(v: &[f64], h: f64, even_left: bool) -> Vec<f64> {
    let n = v.len();
    let h2 = h * h;
    (0..n)
        .map(|i| {
            if i == 0 {
                if even_left {
                    2.0 * (v[1] - v[0]) / h2
                } else {
                    (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
                }
            } else if i == n - 1 {
                (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2
            } else {
                (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_curvature() {
        let p = CylinderParams::new(3, 1).unwrap();
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            5.0,
            101,
            TimeStamp::Rescaled(0.0),
            |_| p.rho(),
        )
        .unwrap();
        for h in prof.mean_curvature() {
            assert!((h - 2.0 / p.rho()).abs() < 1e-14);
        }
        assert_eq!(prof.coordinate(50), 0.0);
    }

    #[test]
    fn sphere_curvature_from_profile() {
        // sphere of radius 2 in R^3 written over the axis, away from the poles
        let p = CylinderParams::new(2, 1).unwrap();
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Radial,
            1.0,
            401,
            TimeStamp::Flow(0.0),
            |y| (4.0 - y * y).sqrt(),
        )
        .unwrap();
        for (i, h) in prof.mean_curvature().iter().enumerate().take(390) {
            assert!((h - 1.0).abs() < 1e-4, "{i}: {h}");
        }
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let p = CylinderParams::new(2, 1).unwrap();
        assert!(RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            1.0,
            11,
            TimeStamp::Flow(0.0),
            |y| y
        )
        .is_err());
        let q = CylinderParams::new(3, 2).unwrap();
        assert!(RadialProfile::from_fn(
            q,
            CoordinateKind::Axis,
            1.0,
            11,
            TimeStamp::Flow(0.0),
            |_| 1.0
        )
        .is_err());
    }
}
