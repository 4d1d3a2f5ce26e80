//! Steppers for the rescaled flow, the unrescaled flow and Jacobi fields.
//!
//! In symmetric reduction the rescaled flow of `{|x| = v(r)}` reads
//!
//! `v_τ = v''/(1 + v'^2) + ((k-1)/r - r/2) v' - (n-k)/v + v/2`
//!
//! and the unrescaled flow drops the `-r v'/2 + v/2` terms. The Jacobi
//! equation is the linearisation at `v = rho`:
//! `u_τ = u'' + ((k-1)/r - r/2) u' + u`.

use super::profile::{CoordinateKind, RadialProfile, TimeStamp};
use super::stepper::{implicit_weight, step, RadialOperator, Reaction, SemiDiscrete, TimeScheme};
use crate::cylinder::CylinderParams;
use crate::error::{domain, Error, Result};

/// Treatment of the outer end of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryMode {
    /// Dirichlet value `rho sqrt(3/2)` at the last node with `|y| <= sqrt(tau)`;
    /// nodes further out hold the same value. Rescaled flow only.
    #[default]
    PinnedHomothetic,
    /// Zero slope at the outer end.
    Neumann,
    /// Outer end values held at their current values.
    Fixed,
}

/// Settings shared by the flow steppers.
#[derive(Debug, Clone, PartialEq)]
pub struct StepperConfig {
    /// Time step (`Δτ` or `Δt`).
    pub dt: f64,
    pub boundary: BoundaryMode,
    /// Runs stop once the minimum radius drops below this value.
    pub pinch_threshold: f64,
    pub max_steps: usize,
    pub scheme: TimeScheme,
    /// Hold the unstable constant (and, on axis grids, linear) modes at
    /// their slaved values after every rescaled step.
    pub mode_control: bool,
    /// If set, the step is capped at `factor * min(v)^2`.
    pub adaptive: Option<f64>,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Result<Self> {
        let c = Self {
            dt,
            boundary: BoundaryMode::PinnedHomothetic,
            pinch_threshold: 1e-3,
            max_steps: 10_000_000,
            scheme: TimeScheme::Ros2,
            mode_control: false,
            adaptive: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return domain("time step must be positive");
        }
        if !(self.pinch_threshold > 0.0) {
            return domain("pinch threshold must be positive");
        }
        if let Some(a) = self.adaptive {
            if !(a > 0.0) {
                return domain("adaptive factor must be positive");
            }
        }
        Ok(())
    }

    pub fn with_boundary(mut self, b: BoundaryMode) -> Self {
        self.boundary = b;
        self
    }

    pub fn with_scheme(mut self, s: TimeScheme) -> Self {
        self.scheme = s;
        self
    }

    pub fn with_mode_control(mut self, on: bool) -> Self {
        self.mode_control = on;
        self
    }

    pub fn with_pinch_threshold(mut self, v: f64) -> Self {
        self.pinch_threshold = v;
        self
    }

    pub fn with_adaptive(mut self, factor: Option<f64>) -> Self {
        self.adaptive = factor;
        self
    }

    pub fn with_max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }
}

/// Radius of the annulus cylinder the rescaled flow is pinned to, `rho sqrt(3/2)`.
pub fn homothetic_boundary_value(params: &CylinderParams) -> f64 {
    params.rho() * 1.5f64.sqrt()
}

/// The homothetic model `rho sqrt(1 + (|y|^2 - 2k)/(2 tau))`.
pub fn homothetic_profile(params: &CylinderParams, r: f64, tau: f64) -> f64 {
    params.rho() * (1.0 + (r * r - 2.0 * params.k() as f64) / (2.0 * tau)).sqrt()
}

/// Threshold on `max |v - rho|` (in units of `rho`) for rescaled steps.
pub const GRAPH_REGIME: f64 = 0.5;
/// Rescaled steps are refused once `min v < DEGENERATE_RADIUS * rho`.
pub const DEGENERATE_RADIUS: f64 = 1e-6;
/// Stability bound on `γ Δt g'(v)` for the linearised reaction.
const REACTION_LIMIT: f64 = 0.5;

fn fixed_mask(profile: &RadialProfile, boundary: BoundaryMode, tau_new: f64) -> Vec<bool> {
    let n = profile.len();
    let mut fixed = vec![false; n];
    match boundary {
        BoundaryMode::Neumann => {}
        BoundaryMode::Fixed => {
            fixed[n - 1] = true;
            if profile.kind() == CoordinateKind::Axis {
                fixed[0] = true;
            }
        }
        BoundaryMode::PinnedHomothetic => {
            let edge = tau_new.max(0.0).sqrt();
            let h = profile.spacing();
            let yb = (0..n)
                .map(|i| profile.coordinate(i).abs())
                .filter(|&s| s <= edge + 1e-9 * h)
                .fold(0.0, f64::max);
            for (i, f) in fixed.iter_mut().enumerate() {
                *f = profile.coordinate(i).abs() >= yb - 1e-9 * h;
            }
            fixed[n - 1] = true;
            if profile.kind() == CoordinateKind::Axis {
                fixed[0] = true;
            }
        }
    }
    fixed
}

fn operator(
    profile: &RadialProfile,
    q: f64,
    reaction: Reaction,
    quasilinear: bool,
    fixed: Vec<bool>,
) -> RadialOperator {
    let radial = profile.kind() == CoordinateKind::Radial;
    RadialOperator {
        start: profile.coordinate(0),
        h: profile.spacing(),
        radial,
        p: if radial {
            profile.params().k() as f64 - 1.0
        } else {
            0.0
        },
        q,
        quasilinear,
        reaction: Some(reaction),
        fixed,
    }
}

fn check_reaction_bound(op: &RadialOperator, v: &[f64], dt: f64, scheme: TimeScheme) -> Result<()> {
    let reaction = op.reaction.expect("reaction present");
    let worst = v
        .iter()
        .zip(&op.fixed)
        .filter(|(_, f)| !**f)
        .map(|(x, _)| reaction.derivative(*x))
        .fold(0.0, f64::max);
    let w = implicit_weight(scheme);
    if w * dt * worst >= REACTION_LIMIT {
        return Err(Error::StepRejected {
            dt,
            suggested: 0.8 * REACTION_LIMIT / (w * worst),
        });
    }
    Ok(())
}

fn check_positive(v: &[f64], profile: &RadialProfile) -> Result<()> {
    if let Some(i) = v.iter().position(|x| *x <= 0.0) {
        return Err(Error::Pinch {
            min_v: v[i],
            location: profile.coordinate(i),
        });
    }
    Ok(())
}

/// Gaussian node weights `w(s) h` for weighted projections over the active region.
fn projection_weights(profile: &RadialProfile, upto: &[bool]) -> Vec<f64> {
    let k = profile.params().k() as i32;
    let h = profile.spacing();
    let radial = profile.kind() == CoordinateKind::Radial;
    (0..profile.len())
        .map(|i| {
            if !upto[i] {
                return 0.0;
            }
            let s = profile.coordinate(i);
            let mut w = (-s * s / 4.0).exp() * h;
            if radial {
                w *= if k == 1 { 1.0 } else { s.abs().powi(k - 1) };
                if i == 0 {
                    w *= 0.5;
                }
            }
            w
        })
        .collect()
}

/// Reset the unstable modes of `u = v - rho` to their slaved values.
///
/// With `F(v)` the discrete right-hand side and `Lu` its linear part, the
/// nonlinearity `Q = F(v) - L u` drives mode `φ` (eigenvalue `λ < 0` of `-L`)
/// by `c' = -λ c + <Q, φ>/<φ, φ>`; the bounded solution is `c = <Q, φ>/(λ <φ, φ>)`.
fn control_unstable_modes(op: &RadialOperator, profile: &RadialProfile, v: &mut [f64]) {
    let rho = profile.params().rho();
    let n = v.len();
    // include the boundary node in the inner products, not the exterior
    let mut region = vec![false; n];
    let mut last_free = 0;
    for i in 0..n {
        if !op.fixed[i] {
            last_free = i;
        }
    }
    for (i, r) in region.iter_mut().enumerate() {
        *r = if profile.kind() == CoordinateKind::Radial {
            i <= (last_free + 1).min(n - 1)
        } else {
            let yb = profile.coordinate(last_free).abs() + profile.spacing();
            profile.coordinate(i).abs() <= yb + 1e-9
        };
    }
    let w = projection_weights(profile, &region);
    let mut modes: Vec<(Vec<f64>, f64)> = vec![(vec![1.0; n], -1.0)];
    if profile.kind() == CoordinateKind::Axis {
        modes.push((profile.coordinates(), -0.5));
    }
    for (phi, lambda) in modes {
        let u: Vec<f64> = v.iter().map(|x| x - rho).collect();
        let f = op.rhs(v);
        let lin = RadialOperator {
            quasilinear: false,
            reaction: Some(Reaction::Identity),
            ..op.clone()
        };
        let lu = lin.rhs(&u);
        let pp: f64 = (0..n).map(|i| w[i] * phi[i] * phi[i]).sum();
        let fq: f64 = (0..n)
            .filter(|&i| !op.fixed[i])
            .map(|i| w[i] * (f[i] - lu[i]) * phi[i])
            .sum::<f64>()
            / pp;
        let c: f64 = (0..n).map(|i| w[i] * u[i] * phi[i]).sum::<f64>() / pp;
        let target = fq / lambda;
        for i in 0..n {
            if !op.fixed[i] {
                v[i] += (target - c) * phi[i];
            }
        }
    }
}

/// One step of the rescaled flow.
pub fn rmcf_step(profile: &RadialProfile, cfg: &StepperConfig) -> Result<RadialProfile> {
    cfg.validate()?;
    let tau = match profile.time() {
        TimeStamp::Rescaled(t) => t,
        TimeStamp::Flow(_) => return domain("rmcf_step needs a profile in rescaled time"),
    };
    let params = *profile.params();
    let rho = params.rho();
    let (imin, vmin) = profile.min();
    if vmin < DEGENERATE_RADIUS * rho {
        return Err(Error::Pinch {
            min_v: vmin,
            location: profile.coordinate(imin),
        });
    }
    let dt = cfg.dt;
    let fixed = fixed_mask(profile, cfg.boundary, tau + dt);
    let mut v = profile.values().to_vec();
    if cfg.boundary == BoundaryMode::PinnedHomothetic {
        let vb = homothetic_boundary_value(&params);
        for (x, f) in v.iter_mut().zip(&fixed) {
            if *f {
                *x = vb;
            }
        }
    }
    let dev = v
        .iter()
        .zip(&fixed)
        .filter(|(_, f)| !**f)
        .map(|(x, _)| (x - rho).abs())
        .fold(0.0, f64::max);
    if dev > GRAPH_REGIME * rho {
        return Err(Error::OutOfRegime(format!(
            "max |v - rho| = {dev:.4} exceeds {GRAPH_REGIME} rho"
        )));
    }
    let op = operator(profile, -0.5, Reaction::Rescaled { rho }, true, fixed);
    check_reaction_bound(&op, &v, dt, cfg.scheme)?;
    let mut out = step(&op, &v, dt, cfg.scheme)?;
    if cfg.mode_control {
        control_unstable_modes(&op, profile, &mut out);
    }
    check_positive(&out, profile)?;
    Ok(profile.with_values(out, profile.time().advanced(dt)))
}

/// One step of the unrescaled flow with time step `dt`.
pub fn mcf_step_dt(profile: &RadialProfile, cfg: &StepperConfig, dt: f64) -> Result<RadialProfile> {
    if !matches!(profile.time(), TimeStamp::Flow(_)) {
        return domain("mcf_step needs a profile in flow time");
    }
    if cfg.boundary == BoundaryMode::PinnedHomothetic {
        return domain("the pinned homothetic boundary applies to the rescaled flow");
    }
    let params = *profile.params();
    let (imin, vmin) = profile.min();
    if vmin <= 0.0 {
        return Err(Error::Pinch {
            min_v: vmin,
            location: profile.coordinate(imin),
        });
    }
    let fixed = fixed_mask(profile, cfg.boundary, 0.0);
    let v = profile.values().to_vec();
    let op = operator(
        profile,
        0.0,
        Reaction::Inverse {
            c: params.sphere_dim() as f64,
        },
        true,
        fixed,
    );
    check_reaction_bound(&op, &v, dt, cfg.scheme)?;
    let out = step(&op, &v, dt, cfg.scheme)?;
    check_positive(&out, profile)?;
    Ok(profile.with_values(out, profile.time().advanced(dt)))
}

/// One step of the unrescaled flow.
pub fn mcf_step(profile: &RadialProfile, cfg: &StepperConfig) -> Result<RadialProfile> {
    cfg.validate()?;
    mcf_step_dt(profile, cfg, cfg.dt)
}

/// Residual `F(v)` of the rescaled equation at the free nodes of a profile.
pub fn rmcf_residual(profile: &RadialProfile) -> Vec<f64> {
    let rho = profile.params().rho();
    let n = profile.len();
    let mut fixed = vec![false; n];
    fixed[n - 1] = true;
    if profile.kind() == CoordinateKind::Axis {
        fixed[0] = true;
    }
    operator(profile, -0.5, Reaction::Rescaled { rho }, true, fixed).rhs(profile.values())
}

/// A Jacobi field sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiGrid {
    params: CylinderParams,
    kind: CoordinateKind,
    h: f64,
    values: Vec<f64>,
    tau: f64,
}

impl JacobiGrid {
    pub fn from_fn(
        params: CylinderParams,
        kind: CoordinateKind,
        extent: f64,
        points: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if kind == CoordinateKind::Axis && params.k() != 1 {
            return domain("axis grids require k = 1");
        }
        if points < 4 || !(extent > 0.0) {
            return domain("grid needs at least 4 points and a positive extent");
        }
        let (start, h) = match kind {
            CoordinateKind::Axis => (-extent, 2.0 * extent / (points - 1) as f64),
            CoordinateKind::Radial => (0.0, extent / (points - 1) as f64),
        };
        let values = (0..points).map(|i| f(start + i as f64 * h)).collect();
        Ok(Self {
            params,
            kind,
            h,
            values,
            tau: 0.0,
        })
    }

    pub fn params(&self) -> &CylinderParams {
        &self.params
    }

    pub fn kind(&self) -> CoordinateKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        match self.kind {
            CoordinateKind::Axis => {
                -0.5 * (self.values.len() - 1) as f64 * self.h + i as f64 * self.h
            }
            CoordinateKind::Radial => i as f64 * self.h,
        }
    }

    /// Weighted `L^2(R^k)` norm by the trapezoid rule (no sphere factor).
    pub fn weighted_norm(&self) -> f64 {
        let k = self.params.k() as i32;
        let n = self.values.len();
        let mut s = 0.0;
        for i in 0..n {
            let y = self.coordinate(i);
            let mut w = (-y * y / 4.0).exp() * self.h;
            if i == 0 || i == n - 1 {
                w *= 0.5;
            }
            if self.kind == CoordinateKind::Radial {
                w *= crate::cylinder::unit_sphere_area(k as usize - 1) * y.abs().powi(k - 1);
            }
            s += w * self.values[i] * self.values[i];
        }
        s.sqrt()
    }
}

/// One step of `∂_τ v = L v`. `boundary` may be `Neumann` or `Fixed`.
pub fn jacobi_step(
    field: &JacobiGrid,
    dt: f64,
    boundary: BoundaryMode,
    scheme: TimeScheme,
) -> Result<JacobiGrid> {
    if !(dt > 0.0) {
        return domain("time step must be positive");
    }
    let n = field.values.len();
    let mut fixed = vec![false; n];
    match boundary {
        BoundaryMode::Neumann => {}
        BoundaryMode::Fixed => {
            fixed[n - 1] = true;
            if field.kind == CoordinateKind::Axis {
                fixed[0] = true;
            }
        }
        BoundaryMode::PinnedHomothetic => {
            return domain("Jacobi fields take Neumann or fixed ends")
        }
    }
    let radial = field.kind == CoordinateKind::Radial;
    let op = RadialOperator {
        start: field.coordinate(0),
        h: field.h,
        radial,
        p: if radial {
            field.params.k() as f64 - 1.0
        } else {
            0.0
        },
        q: -0.5,
        quasilinear: false,
        reaction: Some(Reaction::Identity),
        fixed,
    };
    check_reaction_bound(&op, &field.values, dt, scheme)?;
    let values = step(&op, &field.values, dt, scheme)?;
    Ok(JacobiGrid {
        values,
        tau: field.tau + dt,
        ..field.clone()
    })
}

/// Smallest `tau0` accepted by [`nondegenerate_initial`].
pub const MIN_TAU0: f64 = 10.0;

/// Nondegenerate neck data at rescaled time `tau0` on a radial grid.
///
/// Inside `r <= sqrt(tau0) - 1` the height is `rho (r^2 - 2k) / (4 tau0)`; it is
/// blended by a quintic smoothstep to the annulus radius `rho sqrt(3/2)`, which
/// is held for `r >= sqrt(tau0)`.
pub fn nondegenerate_initial(
    params: &CylinderParams,
    tau0: f64,
    extent: f64,
    points: usize,
) -> Result<RadialProfile> {
    if !(tau0 >= MIN_TAU0) {
        return Err(Error::OutOfRegime(format!(
            "tau0 = {tau0} is below {MIN_TAU0}"
        )));
    }
    let rho = params.rho();
    let k = params.k() as f64;
    let far = homothetic_boundary_value(params);
    let edge = tau0.sqrt();
    RadialProfile::from_fn(
        *params,
        CoordinateKind::Radial,
        extent,
        points,
        TimeStamp::Rescaled(tau0),
        |r| {
            let inner = rho + rho * (r * r - 2.0 * k) / (4.0 * tau0);
            let t = ((r - (edge - 1.0)) / 1.0).clamp(0.0, 1.0);
            let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
            inner * (1.0 - s) + far * s
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p21() -> CylinderParams {
        CylinderParams::new(2, 1).unwrap()
    }

    #[test]
    fn shrinker_is_fixed_point_bitwise() {
        for (n, k) in [(2, 1), (3, 1), (4, 2)] {
            let p = CylinderParams::new(n, k).unwrap();
            let prof = RadialProfile::from_fn(
                p,
                CoordinateKind::Radial,
                8.0,
                81,
                TimeStamp::Rescaled(0.0),
                |_| p.rho(),
            )
            .unwrap();
            let cfg = StepperConfig::new(0.05)
                .unwrap()
                .with_boundary(BoundaryMode::Neumann);
            let next = rmcf_step(&prof, &cfg).unwrap();
            assert_eq!(next.values(), prof.values());
        }
    }

    #[test]
    fn initial_data_examples() {
        let p = p21();
        let prof = nondegenerate_initial(&p, 25.0, 12.0, 241).unwrap();
        assert!((prof.values()[0] - p.rho() + 2f64.sqrt() / 50.0).abs() < 1e-15);
        let i = (2f64.sqrt() / prof.spacing()).round() as usize;
        let r = prof.coordinate(i);
        let want = p.rho() + p.rho() * (r * r - 2.0) / 100.0;
        assert!((prof.values()[i] - want).abs() < 1e-14);
        for i in 0..prof.len() {
            if prof.coordinate(i) >= 5.0 {
                assert!((prof.values()[i] - p.rho() * 1.5f64.sqrt()).abs() < 1e-14);
            }
        }
        assert!(matches!(
            nondegenerate_initial(&p, 5.0, 12.0, 241),
            Err(Error::OutOfRegime(_))
        ));
    }

    #[test]
    fn reaction_bound_rejects_large_steps() {
        let p = p21();
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            2.0,
            41,
            TimeStamp::Flow(0.0),
            |_| 0.1,
        )
        .unwrap();
        let cfg = StepperConfig::new(0.01)
            .unwrap()
            .with_boundary(BoundaryMode::Neumann);
        match mcf_step(&prof, &cfg) {
            Err(Error::StepRejected { suggested, .. }) => assert!(suggested < 0.01),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn jacobi_constant_mode_grows_by_e() {
        let p = p21();
        let run = |dt: f64| {
            let mut f = JacobiGrid::from_fn(p, CoordinateKind::Axis, 8.0, 161, |_| 1.0).unwrap();
            for _ in 0..(1.0 / dt).round() as usize {
                f = jacobi_step(&f, dt, BoundaryMode::Neumann, TimeScheme::Ros2).unwrap();
            }
            f.values()
                .iter()
                .map(|v| (v - std::f64::consts::E).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (run(0.02), run(0.01));
        assert!(e2 < 2e-3, "error {e2}");
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn pinned_boundary_moves_with_tau() {
        let p = p21();
        let prof = nondegenerate_initial(&p, 25.0, 15.0, 301).unwrap();
        let fixed = fixed_mask(&prof, BoundaryMode::PinnedHomothetic, 25.0);
        let first = fixed.iter().position(|f| *f).unwrap();
        assert!((prof.coordinate(first) - 5.0).abs() < 1e-12);
        let fixed = fixed_mask(&prof, BoundaryMode::PinnedHomothetic, 100.0);
        let first = fixed.iter().position(|f| *f).unwrap();
        assert!((prof.coordinate(first) - 10.0).abs() < 1e-12);
    }
}
