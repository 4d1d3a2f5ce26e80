//! Gaussian area, Gaussian density and an entropy lower bound.
//!
//! `F_{c,s}[Σ] = ∫_Σ (4πs)^{-n/2} e^{-|X - c|^2/(4s)}`, with the centre `c`
//! on the symmetry axis so the rotational reduction is kept.

use super::weights::{spine_factor, window_integral};
use crate::cylinder::{unit_sphere_area, CylinderParams};
use crate::error::{domain, Result};
use crate::flow::{CoordinateKind, DualProfile, RadialProfile};
use crate::par::Execution;
use crate::quadrature::GaussLegendre;
use std::f64::consts::PI;

/// Relative tail mass above which a result is flagged.
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Surfaces accepted by [`gaussian_area`].
#[derive(Debug, Clone, Copy)]
pub enum Surface<'a> {
    /// `{|x| = v(y)}`; the centre moves along the `y` axis (`k = 1` only).
    Profile(&'a RadialProfile),
    /// `{|y| = w(|x|)}`; the centre moves along the `y` axis (`k = 1` only).
    DualGraph(&'a DualProfile),
    /// `S^{n-k}(radius) × R^k`.
    Cylinder { params: CylinderParams, radius: f64 },
    /// Round `S^n(radius)` about the origin; the centre moves along one axis.
    Sphere { n: usize, radius: f64 },
    /// A hyperplane at signed distance `offset` from the origin; the centre
    /// moves along its normal.
    Hyperplane { n: usize, offset: f64 },
}

impl Surface<'_> {
    pub fn dimension(&self) -> usize {
        match self {
            Surface::Profile(p) => p.params().n(),
            Surface::DualGraph(w) => w.params().n(),
            Surface::Cylinder { params, .. } => params.n(),
            Surface::Sphere { n, .. } | Surface::Hyperplane { n, .. } => *n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianArea {
    pub value: f64,
    /// Estimated mass outside the sampled domain.
    pub tail: f64,
    /// Set when `tail / value` exceeds [`TAIL_TOLERANCE`].
    pub truncation_warning: bool,
}

impl GaussianArea {
    fn new(value: f64, tail: f64) -> Self {
        let truncation_warning = value > 0.0 && tail / value > TAIL_TOLERANCE;
        Self {
            value,
            tail,
            truncation_warning,
        }
    }
}

fn normaliser(n: usize, scale: f64) -> f64 {
    (4.0 * PI * scale).powf(-(n as f64) / 2.0)
}

/// `∫ f` over `[edge, edge + outward * len]` by composite Gauss-Legendre.
fn tail_integral(edge: f64, outward: f64, len: f64, f: impl Fn(f64) -> f64) -> f64 {
    GaussLegendre::new(16).integrate(|t| f(edge + outward * t), 0.0, len, 64)
}

fn profile_area(p: &RadialProfile, c: f64, s: f64) -> Result<GaussianArea> {
    let params = p.params();
    let k = params.k();
    if c != 0.0 && k != 1 {
        return domain("off-origin centres need k = 1");
    }
    let d = params.sphere_dim();
    let omega = unit_sphere_area(d);
    let dv = p.derivative();
    let coords = p.coordinates();
    let along = |y: f64| match p.kind() {
        CoordinateKind::Axis => (-(y - c).powi(2) / (4.0 * s)).exp(),
        CoordinateKind::Radial if k == 1 => {
            0.5 * ((-(y - c).powi(2) / (4.0 * s)).exp() + (-(y + c).powi(2) / (4.0 * s)).exp())
        }
        CoordinateKind::Radial => (-y * y / (4.0 * s)).exp(),
    };
    let f: Vec<f64> = p
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let y = coords[i];
            omega
                * v.powi(d as i32)
                * (1.0 + dv[i] * dv[i]).sqrt()
                * spine_factor(p, y)
                * (-v * v / (4.0 * s)).exp()
                * along(y)
        })
        .collect();
    let norm = normaliser(params.n(), s);
    let value = norm * window_integral(&coords, &f, f64::NEG_INFINITY, f64::INFINITY);
    let cross = |v: f64| omega * v.powi(d as i32) * (-v * v / (4.0 * s)).exp();
    let last = p.len() - 1;
    let len = 40.0 * s.sqrt() + c.abs();
    let mut tail = norm
        * cross(p.values()[last])
        * tail_integral(coords[last], 1.0, len, |y| spine_factor(p, y) * along(y));
    if p.kind() == CoordinateKind::Axis {
        tail += norm * cross(p.values()[0]) * tail_integral(coords[0], -1.0, len, along);
    }
    Ok(GaussianArea::new(value + tail, tail))
}

fn dual_area(w: &DualProfile, c: f64, s: f64) -> Result<GaussianArea> {
    let params = w.params();
    let k = params.k();
    if c != 0.0 && k != 1 {
        return domain("off-origin centres need k = 1");
    }
    let m = params.sphere_dim() + 1;
    let (om, ok) = (unit_sphere_area(m - 1), unit_sphere_area(k - 1));
    let vals = w.values();
    let h = w.spacing();
    let n = vals.len();
    let coords: Vec<f64> = (0..n).map(|i| w.coordinate(i)).collect();
    let sheet = |y: f64| {
        if k == 1 {
            0.5 * ((-(y - c).powi(2) / (4.0 * s)).exp() + (-(y + c).powi(2) / (4.0 * s)).exp())
        } else {
            (-y * y / (4.0 * s)).exp()
        }
    };
    let f: Vec<f64> = (0..n)
        .map(|i| {
            let dw = if i == 0 {
                0.0
            } else if i == n - 1 {
                (vals[i] - vals[i - 1]) / h
            } else {
                (vals[i + 1] - vals[i - 1]) / (2.0 * h)
            };
            let x = coords[i];
            om * x.powi(m as i32 - 1)
                * ok
                * vals[i].powi(k as i32 - 1)
                * (1.0 + dw * dw).sqrt()
                * (-x * x / (4.0 * s)).exp()
                * sheet(vals[i])
        })
        .collect();
    let norm = normaliser(params.n(), s);
    let value = norm * window_integral(&coords, &f, 0.0, f64::INFINITY);
    let wl = vals[n - 1];
    let tail = norm
        * ok
        * wl.powi(k as i32 - 1)
        * sheet(wl)
        * tail_integral(coords[n - 1], 1.0, 40.0 * s.sqrt(), |x| {
            om * x.powi(m as i32 - 1) * (-x * x / (4.0 * s)).exp()
        });
    Ok(GaussianArea::new(value + tail, tail))
}

/// Gaussian area of `surface` seen from centre `c` (on the axis) at scale `s`.
pub fn gaussian_area(surface: Surface<'_>, center: f64, scale: f64) -> Result<GaussianArea> {
    if !(scale > 0.0) || !center.is_finite() {
        return domain("scale must be positive and the centre finite");
    }
    let s = scale;
    match surface {
        Surface::Profile(p) => profile_area(p, center, s),
        Surface::DualGraph(w) => dual_area(w, center, s),
        Surface::Cylinder { params, radius } => {
            if !(radius > 0.0) {
                return domain("radius must be positive");
            }
            let d = params.sphere_dim();
            let v = normaliser(d, s)
                * unit_sphere_area(d)
                * radius.powi(d as i32)
                * (-radius * radius / (4.0 * s)).exp();
            Ok(GaussianArea::new(v, 0.0))
        }
        Surface::Sphere { n, radius } => {
            if n == 0 || !(radius > 0.0) {
                return domain("sphere needs n >= 1 and a positive radius");
            }
            let gl = GaussLegendre::new(20);
            let b = radius * center / (2.0 * s);
            // shift the exponent by |b| to keep it bounded
            let ang = gl.integrate(
                |t| t.sin().powi(n as i32 - 1) * (b * t.cos() - b.abs()).exp(),
                0.0,
                PI,
                64,
            );
            let log_v = -(radius * radius + center * center) / (4.0 * s) + b.abs();
            let v = normaliser(n, s)
                * unit_sphere_area(n - 1)
                * radius.powi(n as i32)
                * ang
                * log_v.exp();
            Ok(GaussianArea::new(v, 0.0))
        }
        Surface::Hyperplane { n, offset } => {
            if n == 0 {
                return domain("hyperplane needs n >= 1");
            }
            Ok(GaussianArea::new(
                (-(offset - center).powi(2) / (4.0 * s)).exp(),
                0.0,
            ))
        }
    }
}

/// Best `(centre, scale)` found by [`entropy_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// A lower bound for the entropy: the largest area found.
    pub value: f64,
    pub center: f64,
    pub scale: f64,
}

/// Search box for [`entropy_lower_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropySearch {
    pub center: (f64, f64),
    pub scale: (f64, f64),
    /// Samples per direction on the coarse grid.
    pub grid: usize,
    /// Refinement rounds around the best cell.
    pub rounds: usize,
}

impl Default for EntropySearch {
    fn default() -> Self {
        Self {
            center: (-2.0, 2.0),
            scale: (0.1, 10.0),
            grid: 9,
            rounds: 6,
        }
    }
}

/// Largest Gaussian area over a grid of centres and scales, refined around the best cell.
///
/// Scales are sampled geometrically. The result is only a lower bound.
pub fn entropy_lower_bound(
    surface: Surface<'_>,
    search: &EntropySearch,
    exec: Execution,
) -> Result<EntropyEstimate> {
    let g = search.grid.max(2);
    let (c0, c1) = search.center;
    let (s0, s1) = (search.scale.0.ln(), search.scale.1.ln());
    if !(search.scale.0 > 0.0 && s1 >= s0 && c1 >= c0) {
        return domain("entropy search box is empty");
    }
    let eval = |c: f64, ls: f64| {
        gaussian_area(surface, c, ls.exp())
            .map(|a| a.value)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (mut lo_c, mut hi_c, mut lo_s, mut hi_s) = (c0, c1, s0, s1);
    let mut best = EntropyEstimate {
        value: f64::NEG_INFINITY,
        center: c0,
        scale: search.scale.0,
    };
    for _ in 0..=search.rounds {
        let dc = (hi_c - lo_c) / (g - 1) as f64;
        let ds = (hi_s - lo_s) / (g - 1) as f64;
        let vals = exec.map_range(g * g, |idx| {
            let (i, j) = (idx / g, idx % g);
            let (c, ls) = (lo_c + i as f64 * dc, lo_s + j as f64 * ds);
            (eval(c, ls), c, ls)
        });
        for (v, c, ls) in vals {
            if v > best.value {
                best = EntropyEstimate {
                    value: v,
                    center: c,
                    scale: ls.exp(),
                };
            }
        }
        let (bc, bs) = (best.center, best.scale.ln());
        lo_c = (bc - dc).max(c0);
        hi_c = (bc + dc).min(c1);
        lo_s = (bs - ds).max(s0);
        hi_s = (bs + ds).min(s1);
    }
    if !best.value.is_finite() {
        return domain("no admissible centre and scale in the search box");
    }
    Ok(best)
}
