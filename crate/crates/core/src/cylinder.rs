//! Cylinder parameters, the regularised distance cutoff and the geometry of
//! graphs over the round cylinder `S^{n-k}(rho) x R^k`.
//!
//! Points of `R^{n+1}` are split as `(x, y)` with `x` in `R^{n-k+1}` and `y` in
//! `R^k`. A graph over the cylinder is described by a height `u(theta, y)`;
//! the embedded point is `(theta + u * theta_hat, y)` where `|theta| = rho`.

use crate::error::{domain, Error, Result};

/// Threshold on `||u||_{C^1} + |xhat| + |lambda - 1|` for the graph transform.
pub const KAPPA_PRIME: f64 = 0.1;
/// Graphical-radius thresholds. Fixed small constants.
pub const KAPPA: f64 = 0.1;
pub const KAPPA_DOUBLE_PRIME: f64 = 0.1;

/// Dimensions `(n, k)` of the generalised cylinder and its radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderParams {
    n: usize,
    k: usize,
    rho: f64,
}

impl CylinderParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 || k < 1 || k >= n {
            return domain(format!(
                "need n >= 2 and 1 <= k <= n-1, got (n, k) = ({n}, {k})"
            ));
        }
        Ok(Self {
            n,
            k,
            rho: (2.0 * (n - k) as f64).sqrt(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Dimension `n - k` of the sphere factor.
    pub fn sphere_dim(&self) -> usize {
        self.n - self.k
    }

    /// Area of the sphere factor `S^{n-k}(radius)`.
    pub fn sphere_area(&self, radius: f64) -> f64 {
        unit_sphere_area(self.sphere_dim()) * radius.powi(self.sphere_dim() as i32)
    }
}

/// Construct the parameters of `C_{n,k}`.
pub fn make_cylinder(n: usize, k: usize) -> Result<CylinderParams> {
    CylinderParams::new(n, k)
}

/// Area of the unit sphere `S^d` in `R^{d+1}`.
pub fn unit_sphere_area(d: usize) -> f64 {
    use std::f64::consts::PI;
    let mut area = if d.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut m = d % 2;
    while m < d {
        m += 2;
        area *= 2.0 * PI / (m - 1) as f64;
    }
    area
}

/// The fixed cutoff `chi`: identity on `[-1/2, 1/2]`, `sign(s)` beyond `sqrt 2`,
/// joined by a quintic that matches value and two derivatives at both ends.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChiCutoff;

const CHI_A: f64 = 0.5;
const CHI_B: f64 = std::f64::consts::SQRT_2;

/// Coefficients `c3, c4, c5` of the blend in the local variable
/// `t = (s - 1/2) / (sqrt 2 - 1/2)`, with `p(t) = 1/2 + L t + c3 t^3 + c4 t^4 + c5 t^5`.
fn chi_coefficients() -> (f64, f64, f64, f64) {
    let l = CHI_B - CHI_A;
    let a = 0.5 - l;
    let b = -l;
    let c5 = 6.0 * a - 3.0 * b;
    let c4 = b - 3.0 * a - 2.0 * c5;
    let c3 = a - c4 - c5;
    (l, c3, c4, c5)
}

impl ChiCutoff {
    pub fn value(&self, s: f64) -> f64 {
        let a = s.abs();
        let v = if a <= CHI_A {
            a
        } else if a >= CHI_B {
            1.0
        } else {
            let (l, c3, c4, c5) = chi_coefficients();
            let t = (a - CHI_A) / l;
            0.5 + l * t + t * t * t * (c3 + t * (c4 + t * c5))
        };
        v.copysign(s)
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let a = s.abs();
        if a <= CHI_A {
            1.0
        } else if a >= CHI_B {
            0.0
        } else {
            let (l, c3, c4, c5) = chi_coefficients();
            let t = (a - CHI_A) / l;
            (l + t * t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5))) / l
        }
    }

    pub fn second_derivative(&self, s: f64) -> f64 {
        let a = s.abs();
        let v = if a <= CHI_A || a >= CHI_B {
            0.0
        } else {
            let (l, c3, c4, c5) = chi_coefficients();
            let t = (a - CHI_A) / l;
            t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5)) / (l * l)
        };
        if s < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Shorthand for `ChiCutoff.value(s)`.
pub fn chi_eval(s: f64) -> f64 {
    ChiCutoff.value(s)
}

/// Regularised signed distance to the cylinder: `chi(|x| - rho)`.
pub fn odist(x: &[f64], y: &[f64], params: &CylinderParams) -> Result<f64> {
    if x.len() != params.sphere_dim() + 1 || y.len() != params.k() {
        return domain(format!(
            "point must split as R^{} x R^{}, got {} + {}",
            params.sphere_dim() + 1,
            params.k(),
            x.len(),
            y.len()
        ));
    }
    Ok(chi_eval(norm(x) - params.rho()))
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Symmetry reduction of a graph patch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PatchDomain {
    /// `k = 1`, the height depends on `y` in `[y_min, y_min + (N-1) h]`.
    Line { y_min: f64 },
    /// `SO(k)`-symmetric, the height depends on `r = |y|` in `[0, (N-1) h]`.
    Radial,
}

/// A location on the cylinder: a unit vector in the sphere factor and a spine point.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPoint {
    pub theta_hat: Vec<f64>,
    pub y: Vec<f64>,
}

impl CylinderPoint {
    pub fn new(theta_hat: Vec<f64>, y: Vec<f64>) -> Self {
        Self { theta_hat, y }
    }
}

/// A surface written as a graph over `C_{n,k}`.
pub trait GraphSurface {
    fn params(&self) -> &CylinderParams;
    /// Height `u` above the cylinder point `(rho * theta_hat, y)`.
    fn height(&self, theta_hat: &[f64], y: &[f64]) -> f64;
    /// Bound on `sup |u| + sup |grad u|`.
    fn c1_norm(&self) -> f64;
    /// Bound on the angular gradient `sup |grad_theta u|`.
    fn theta_gradient_bound(&self) -> f64;
    /// Lower bound on `u`.
    fn min_height(&self) -> f64;
}

/// `theta`-invariant graph height sampled on a uniform grid, with gradient samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPatch {
    params: CylinderParams,
    domain: PatchDomain,
    h: f64,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl GraphPatch {
    /// Line patch (`k = 1`) with samples at `y_min + i h`.
    pub fn line(params: CylinderParams, y_min: f64, h: f64, u: Vec<f64>) -> Result<Self> {
        if params.k() != 1 {
            return domain("line patches require k = 1");
        }
        Self::build(params, PatchDomain::Line { y_min }, h, u)
    }

    /// Radial patch with samples at `r = i h`; `u` is extended evenly through `r = 0`.
    pub fn radial(params: CylinderParams, h: f64, u: Vec<f64>) -> Result<Self> {
        Self::build(params, PatchDomain::Radial, h, u)
    }

    pub fn line_from_fn(
        params: CylinderParams,
        y_min: f64,
        y_max: f64,
        points: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if points < 3 || y_max <= y_min {
            return domain("line patch needs at least 3 points on a nonempty interval");
        }
        let h = (y_max - y_min) / (points - 1) as f64;
        let u = (0..points).map(|i| f(y_min + i as f64 * h)).collect();
        Self::line(params, y_min, h, u)
    }

    pub fn radial_from_fn(
        params: CylinderParams,
        r_max: f64,
        points: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if points < 3 || r_max <= 0.0 {
            return domain("radial patch needs at least 3 points and r_max > 0");
        }
        let h = r_max / (points - 1) as f64;
        let u = (0..points).map(|i| f(i as f64 * h)).collect();
        Self::radial(params, h, u)
    }

    fn build(
        params: CylinderParams,
        domain_kind: PatchDomain,
        h: f64,
        u: Vec<f64>,
    ) -> Result<Self> {
        if u.len() < 3 || !(h > 0.0) {
            return domain("patch needs at least 3 samples and positive spacing");
        }
        if let Some(bad) = u.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite height at sample {bad}"));
        }
        let rho = params.rho();
        if let Some(i) = u.iter().position(|&v| v <= -rho) {
            let loc = match domain_kind {
                PatchDomain::Line { y_min } => y_min + i as f64 * h,
                PatchDomain::Radial => i as f64 * h,
            };
            return Err(Error::DegenerateGraph {
                value: u[i],
                location: loc,
            });
        }
        let n = u.len();
        let du = (0..n)
            .map(|i| {
                if i == 0 {
                    match domain_kind {
                        PatchDomain::Radial => 0.0,
                        PatchDomain::Line { .. } => (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h),
                    }
                } else if i == n - 1 {
                    (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
                } else {
                    (u[i + 1] - u[i - 1]) / (2.0 * h)
                }
            })
            .collect();
        Ok(Self {
            params,
            domain: domain_kind,
            h,
            u,
            du,
        })
    }

    pub fn domain(&self) -> PatchDomain {
        self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn samples(&self) -> &[f64] {
        &self.u
    }

    pub fn gradient_samples(&self) -> &[f64] {
        &self.du
    }

    /// Coordinate of sample `i` (signed `y` for lines, `r` for radial patches).
    pub fn coordinate(&self, i: usize) -> f64 {
        match self.domain {
            PatchDomain::Line { y_min } => y_min + i as f64 * self.h,
            PatchDomain::Radial => i as f64 * self.h,
        }
    }

    /// Height and its derivative in the reduced coordinate, zero outside the domain.
    pub fn eval_reduced(&self, s: f64) -> (f64, f64) {
        let start = match self.domain {
            PatchDomain::Line { y_min } => y_min,
            PatchDomain::Radial => 0.0,
        };
        let n = self.u.len();
        let t = (s - start) / self.h;
        if t < 0.0 || t > (n - 1) as f64 || !t.is_finite() {
            return (0.0, 0.0);
        }
        let i = (t.floor() as usize).min(n - 2);
        let x = t - i as f64;
        let (p0, p1) = (self.u[i], self.u[i + 1]);
        let (m0, m1) = (self.du[i] * self.h, self.du[i + 1] * self.h);
        let x2 = x * x;
        let x3 = x2 * x;
        let val = (2.0 * x3 - 3.0 * x2 + 1.0) * p0
            + (x3 - 2.0 * x2 + x) * m0
            + (-2.0 * x3 + 3.0 * x2) * p1
            + (x3 - x2) * m1;
        let der = ((6.0 * x2 - 6.0 * x) * p0
            + (3.0 * x2 - 4.0 * x + 1.0) * m0
            + (-6.0 * x2 + 6.0 * x) * p1
            + (3.0 * x2 - 2.0 * x) * m1)
            / self.h;
        (val, der)
    }

    fn reduced_coordinate(&self, y: &[f64]) -> f64 {
        match self.domain {
            PatchDomain::Line { .. } => y[0],
            PatchDomain::Radial => norm(y),
        }
    }

    /// Gradient of `u` in the spine directions at `y`.
    pub fn spine_gradient(&self, y: &[f64]) -> Vec<f64> {
        let s = self.reduced_coordinate(y);
        let (_, d) = self.eval_reduced(s);
        match self.domain {
            PatchDomain::Line { .. } => vec![d],
            PatchDomain::Radial => {
                if s == 0.0 {
                    vec![0.0; y.len()]
                } else {
                    y.iter().map(|c| d * c / s).collect()
                }
            }
        }
    }
}

impl GraphSurface for GraphPatch {
    fn params(&self) -> &CylinderParams {
        &self.params
    }

    fn height(&self, _theta_hat: &[f64], y: &[f64]) -> f64 {
        self.eval_reduced(self.reduced_coordinate(y)).0
    }

    fn c1_norm(&self) -> f64 {
        let a = self.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let b = self.du.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a + b
    }

    fn theta_gradient_bound(&self) -> f64 {
        0.0
    }

    fn min_height(&self) -> f64 {
        self.u.iter().copied().fold(0.0f64, f64::min)
    }
}

/// Unit normal, area element and embedded point of a graph at one location.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphGeometry {
    /// Ambient unit normal, `x` components first.
    pub normal: Vec<f64>,
    /// Area element relative to the cylinder.
    pub area_element: f64,
    /// Embedded point `(theta + u theta_hat, y)`.
    pub point: Vec<f64>,
}

/// Normal, area element and embedded point of the graph of `patch` at `loc`.
pub fn graph_geometry(patch: &GraphPatch, loc: &CylinderPoint) -> Result<GraphGeometry> {
    let p = patch.params;
    if loc.theta_hat.len() != p.sphere_dim() + 1 || loc.y.len() != p.k() {
        return domain("location dimensions do not match the cylinder");
    }
    let th_norm = norm(&loc.theta_hat);
    if (th_norm - 1.0).abs() > 1e-9 {
        return domain("theta_hat must be a unit vector");
    }
    let rho = p.rho();
    let u = patch.height(&loc.theta_hat, &loc.y);
    if u <= -rho {
        return Err(Error::DegenerateGraph {
            value: u,
            location: patch.reduced_coordinate(&loc.y),
        });
    }
    let grad_y = patch.spine_gradient(&loc.y);
    let g2 = dot(&grad_y, &grad_y);
    let s = (1.0 + g2).sqrt();
    let mut normal: Vec<f64> = loc.theta_hat.iter().map(|t| t / s).collect();
    normal.extend(grad_y.iter().map(|g| -g / s));
    let area_element = (1.0 + u / rho).powi(p.sphere_dim() as i32) * s;
    let mut point: Vec<f64> = loc.theta_hat.iter().map(|t| (rho + u) * t).collect();
    point.extend_from_slice(&loc.y);
    Ok(GraphGeometry {
        normal,
        area_element,
        point,
    })
}

/// The graph obtained from `source` by `X -> lambda X - (xhat, yhat)`.
///
/// Heights are computed exactly by projecting along the sphere directions; the
/// first-order model and the reported bound follow the transformation law for
/// graphs over the cylinder.
#[derive(Debug, Clone)]
pub struct TransformedGraph<G> {
    source: G,
    lambda: f64,
    xhat: Vec<f64>,
    yhat: Vec<f64>,
    bound_constant: f64,
}

/// Apply `X -> lambda X - (xhat, yhat)` to a graph over the cylinder.
pub fn transform_graph<G: GraphSurface>(
    source: G,
    lambda: f64,
    xhat: &[f64],
    yhat: &[f64],
) -> Result<TransformedGraph<G>> {
    let p = *source.params();
    if xhat.len() != p.sphere_dim() + 1 || yhat.len() != p.k() {
        return domain("translation dimensions do not match the cylinder");
    }
    if !(lambda > 0.0) {
        return domain("lambda must be positive");
    }
    let size = source.c1_norm() + norm(xhat) + (lambda - 1.0).abs();
    if size > KAPPA_PRIME {
        return Err(Error::OutOfRegime(format!(
            "||u||_C1 + |xhat| + |lambda - 1| = {size:.4} exceeds {KAPPA_PRIME}"
        )));
    }
    let r_min = lambda * (p.rho() + source.min_height());
    Ok(TransformedGraph {
        source,
        lambda,
        xhat: xhat.to_vec(),
        yhat: yhat.to_vec(),
        bound_constant: 1.0 / r_min,
    })
}

impl<G: GraphSurface> TransformedGraph<G> {
    pub fn source(&self) -> &G {
        &self.source
    }

    /// First-order model `-xhat.theta_hat + rho (lambda - 1) + lambda u(theta, (y + yhat)/lambda)`.
    pub fn linear_model(&self, theta_hat: &[f64], y: &[f64]) -> f64 {
        let rho = self.source.params().rho();
        let ys: Vec<f64> = y
            .iter()
            .zip(&self.yhat)
            .map(|(a, b)| (a + b) / self.lambda)
            .collect();
        -dot(&self.xhat, theta_hat)
            + rho * (self.lambda - 1.0)
            + self.lambda * self.source.height(theta_hat, &ys)
    }

    /// Bound `C (||grad_theta u|| + |xhat|) |xhat|` on `height - linear_model`.
    pub fn error_bound(&self) -> f64 {
        let xn = norm(&self.xhat);
        self.bound_constant * (self.source.theta_gradient_bound() + xn) * xn
    }

    /// The measured constant `C` used in [`Self::error_bound`].
    pub fn bound_constant(&self) -> f64 {
        self.bound_constant
    }

    /// Sample a `theta`-invariant result on the grid of `like`.
    pub fn to_patch(&self, like: &GraphPatch) -> Result<GraphPatch> {
        if norm(&self.xhat) > 0.0 || self.source.theta_gradient_bound() > 0.0 {
            return domain("transformed graph is not theta-invariant");
        }
        let p = *self.source.params();
        let mut th = vec![0.0; p.sphere_dim() + 1];
        th[0] = 1.0;
        let u = (0..like.u.len())
            .map(|i| {
                let s = like.coordinate(i);
                let mut y = vec![0.0; p.k()];
                y[0] = s;
                self.height(&th, &y)
            })
            .collect();
        GraphPatch::build(p, like.domain, like.h, u)
    }
}

impl<G: GraphSurface> GraphSurface for TransformedGraph<G> {
    fn params(&self) -> &CylinderParams {
        self.source.params()
    }

    fn height(&self, theta_hat: &[f64], y: &[f64]) -> f64 {
        let rho = self.source.params().rho();
        let ys: Vec<f64> = y
            .iter()
            .zip(&self.yhat)
            .map(|(a, b)| (a + b) / self.lambda)
            .collect();
        let c = dot(theta_hat, &self.xhat);
        let x2 = dot(&self.xhat, &self.xhat);
        // Preimage direction theta_0 satisfies lambda (rho + u(theta_0)) theta_0 - xhat = s theta_hat.
        let mut th0 = theta_hat.to_vec();
        let mut s = 0.0;
        for _ in 0..60 {
            let r = self.lambda * (rho + self.source.height(&th0, &ys));
            s = -c + (c * c + r * r - x2).sqrt();
            let next: Vec<f64> = theta_hat
                .iter()
                .zip(&self.xhat)
                .map(|(t, x)| (s * t + x) / r)
                .collect();
            let nn = norm(&next);
            let next: Vec<f64> = next.iter().map(|v| v / nn).collect();
            let diff = next
                .iter()
                .zip(&th0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            th0 = next;
            if diff < 1e-15 {
                break;
            }
        }
        s - rho
    }

    fn c1_norm(&self) -> f64 {
        let rho = self.source.params().rho();
        norm(&self.xhat)
            + rho * (self.lambda - 1.0).abs()
            + self.lambda.max(1.0) * self.source.c1_norm()
            + self.error_bound()
    }

    fn theta_gradient_bound(&self) -> f64 {
        norm(&self.xhat) * (1.0 + self.bound_constant * norm(&self.xhat))
            + self.source.theta_gradient_bound()
    }

    fn min_height(&self) -> f64 {
        let rho = self.source.params().rho();
        (rho * (self.lambda - 1.0) + self.lambda * self.source.min_height() - norm(&self.xhat))
            .min(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_and_ranges() {
        assert!((make_cylinder(2, 1).unwrap().rho() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((make_cylinder(7, 3).unwrap().rho() - 8f64.sqrt()).abs() < 1e-15);
        assert!(make_cylinder(2, 2).is_err());
        assert!(make_cylinder(1, 0).is_err());
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((unit_sphere_area(0) - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi_eval(0.3), 0.3);
        assert_eq!(chi_eval(2.0), 1.0);
        assert_eq!(chi_eval(-2.0), -1.0);
    }

    #[test]
    fn chi_blend_matches_endpoints() {
        let c = ChiCutoff;
        let e = 1e-9;
        for s in [CHI_A, CHI_B] {
            assert!((c.value(s - e) - c.value(s + e)).abs() < 1e-8);
            assert!((c.derivative(s - e) - c.derivative(s + e)).abs() < 1e-7);
            assert!((c.second_derivative(s - e) - c.second_derivative(s + e)).abs() < 1e-6);
        }
        // finite differences agree with the analytic derivatives inside the blend
        for i in 1..50 {
            let s = CHI_A + (CHI_B - CHI_A) * i as f64 / 50.0;
            let d = 1e-6;
            let fd1 = (c.value(s + d) - c.value(s - d)) / (2.0 * d);
            let fd2 = (c.derivative(s + d) - c.derivative(s - d)) / (2.0 * d);
            assert!((fd1 - c.derivative(s)).abs() < 1e-8);
            assert!((fd2 - c.second_derivative(s)).abs() < 1e-6);
        }
    }

    #[test]
    fn chi_is_concave_and_monotone_on_half_line() {
        let c = ChiCutoff;
        for i in 0..=4000 {
            let s = 2.0 * i as f64 / 4000.0;
            assert!(c.second_derivative(s) <= 1e-14, "chi'' > 0 at {s}");
            assert!(c.derivative(s) >= 0.0);
        }
    }

    #[test]
    fn odist_examples() {
        let p = make_cylinder(2, 1).unwrap();
        let r = p.rho();
        assert!(odist(&[r, 0.0], &[3.0], &p).unwrap().abs() < 1e-15);
        assert!((odist(&[0.0, r + 0.3], &[-1.0], &p).unwrap() - 0.3).abs() < 1e-14);
        assert_eq!(odist(&[r + 5.0, 0.0], &[0.0], &p).unwrap(), 1.0);
        assert!(odist(&[r], &[0.0], &p).is_err());
    }

    #[test]
    fn flat_cylinder_geometry() {
        let p = make_cylinder(3, 1).unwrap();
        let patch = GraphPatch::line_from_fn(p, -3.0, 3.0, 61, |_| 0.0).unwrap();
        let loc = CylinderPoint::new(vec![0.0, 0.6, 0.8], vec![0.4]);
        let g = graph_geometry(&patch, &loc).unwrap();
        assert_eq!(g.normal, vec![0.0, 0.6, 0.8, -0.0]);
        assert_eq!(g.area_element, 1.0);
    }

    #[test]
    fn constant_height_area_element() {
        let p = make_cylinder(2, 1).unwrap();
        let c = 0.2;
        let patch = GraphPatch::line_from_fn(p, -3.0, 3.0, 61, |_| c).unwrap();
        let g = graph_geometry(&patch, &CylinderPoint::new(vec![1.0, 0.0], vec![0.5])).unwrap();
        assert!((g.area_element - (1.0 + c / p.rho())).abs() < 1e-14);
        assert!((g.point[0] - (p.rho() + c)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_graph_rejected() {
        let p = make_cylinder(2, 1).unwrap();
        let r = p.rho();
        assert!(matches!(
            GraphPatch::line_from_fn(p, -1.0, 1.0, 11, |_| -r - 0.1),
            Err(Error::DegenerateGraph { .. })
        ));
    }

    #[test]
    fn spine_translation_is_exact_on_grid() {
        let p = make_cylinder(2, 1).unwrap();
        let patch = GraphPatch::line_from_fn(p, -4.0, 4.0, 81, |y| 0.01 * (-y * y).exp()).unwrap();
        let b = 0.3;
        let t = transform_graph(patch.clone(), 1.0, &[0.0, 0.0], &[b]).unwrap();
        for i in 0..50 {
            let y = -3.0 + 0.1 * i as f64;
            let got = t.height(&[1.0, 0.0], &[y]);
            let want = patch.height(&[1.0, 0.0], &[y + b]);
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(t.error_bound(), 0.0);
    }

    #[test]
    fn dilation_of_flat_cylinder() {
        let p = make_cylinder(3, 1).unwrap();
        let patch = GraphPatch::line_from_fn(p, -2.0, 2.0, 41, |_| 0.0).unwrap();
        let t = transform_graph(patch, 1.01, &[0.0; 3], &[0.0]).unwrap();
        let v = t.height(&[0.0, 0.0, 1.0], &[0.7]);
        assert!((v - 0.01 * p.rho()).abs() < 1e-14);
    }

    #[test]
    fn precondition_enforced() {
        let p = make_cylinder(2, 1).unwrap();
        let patch = GraphPatch::line_from_fn(p, -2.0, 2.0, 41, |_| 0.0).unwrap();
        assert!(matches!(
            transform_graph(patch, 1.2, &[0.0, 0.0], &[0.0]),
            Err(Error::OutOfRegime(_))
        ));
    }
}
