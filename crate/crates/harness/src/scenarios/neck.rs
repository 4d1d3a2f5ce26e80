//! Unrescaled neckpinch, exact shrinking solutions and the post-singular restart.

use anyhow::{bail, Result};
use neckflow::flow::{
    detect_pinch, mcf_step_dt, neckpinch_initial, normal_sign_condition, post_singular_step,
    run_polar, BoundaryMode, CoordinateKind, DualProfile, FlowTrace, PinchStatus, PolarProfile,
    RadialProfile, StepperConfig, Termination, TimeScheme, TimeStamp, TraceRecord,
};
use neckflow::CylinderParams;

use super::{cylinder, trace_table, Outcome};
use crate::config::RunConfig;
use crate::output::Table;

/// Grid size for the exact-solution checks.
const EXACT_POINTS: usize = 1000;
const EXACT_TOL: f64 = 1e-4;
/// The neckpinch run stops once the minimum radius falls below this.
const STOP_RADIUS: f64 = 2e-3;
/// Step cap relative to `min v^2`.
const STEP_FACTOR: f64 = 0.05;
const RATIO_YS: [f64; 9] = [0.02, 0.025, 0.03, 0.04, 0.05, 0.06, 0.07, 0.085, 0.1];

/// Largest relative error of a shrinking cylinder against `sqrt(R0^2 - 2(n-k)t)`
/// over half its lifespan.
fn cylinder_law(params: &CylinderParams, table: &mut Table) -> Result<f64> {
    let r0 = 1.3;
    let dim = (params.n() - params.k()) as f64;
    let kind = if params.k() == 1 {
        CoordinateKind::Axis
    } else {
        CoordinateKind::Radial
    };
    let mut prof = RadialProfile::from_fn(
        *params,
        kind,
        5.0,
        EXACT_POINTS,
        TimeStamp::Flow(0.0),
        |_| r0,
    )?;
    let cfg = StepperConfig::new(1e-3)?.with_boundary(BoundaryMode::Neumann);
    let steps = 400;
    let dt = r0 * r0 / (4.0 * dim) / steps as f64;
    let mut worst = 0.0f64;
    for i in 1..=steps {
        prof = mcf_step_dt(&prof, &cfg, dt)?;
        let t = prof.time().value();
        let want = (r0 * r0 - 2.0 * dim * t).sqrt();
        let err = prof
            .values()
            .iter()
            .map(|v| (v / want - 1.0).abs())
            .fold(0.0, f64::max);
        worst = worst.max(err);
        if i % 40 == 0 {
            table.push(vec![
                "cylinder".into(),
                t.into(),
                prof.min().1.into(),
                want.into(),
                err.into(),
            ]);
        }
    }
    Ok(worst)
}

/// Largest relative error of a round sphere against `sqrt(R0^2 - 2nt)` over half its lifespan.
fn sphere_law(n: usize, table: &mut Table) -> Result<f64> {
    let r0 = 1.0;
    let s = PolarProfile::sphere(n, r0, EXACT_POINTS)?;
    let run = run_polar(&s, 1e-4, 0.05, 0.5f64.sqrt() * r0, TimeScheme::Ros2)?;
    let lifespan = r0 * r0 / (2.0 * n as f64);
    if run.last.time() < 0.49 * lifespan {
        bail!(
            "sphere run stopped at t = {} before half its lifespan",
            run.last.time()
        );
    }
    let mut worst = 0.0f64;
    for (i, (t, r)) in run.samples.iter().enumerate() {
        let want = (r0 * r0 - 2.0 * n as f64 * t).sqrt();
        let err = (r / want - 1.0).abs();
        worst = worst.max(err);
        if i % 20 == 0 {
            table.push(vec![
                "sphere".into(),
                (*t).into(),
                (*r).into(),
                want.into(),
                err.into(),
            ]);
        }
    }
    Ok(worst)
}

fn flow_record(p: &RadialProfile) -> TraceRecord {
    let (i, v) = p.min();
    let h_min = p.mean_curvature().into_iter().fold(f64::INFINITY, f64::min);
    TraceRecord {
        time: p.time().value(),
        min_v: v,
        argmin: p.coordinate(i),
        h_min,
        mean_convex: h_min > 0.0,
        distance: None,
        alpha: None,
    }
}

/// `v(y) 2 sqrt(-log y) / (rho y)`.
fn cusp_ratio(v: f64, y: f64, rho: f64) -> f64 {
    v * 2.0 * (-y.ln()).sqrt() / (rho * y)
}

pub(super) fn neckpinch_mcf(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let rho = params.rho();
    let mut out = Outcome::default();

    let mut exact = Table::new(
        "exact_solutions",
        &["solution", "t", "radius", "exact", "rel_error"],
    );
    let cyl_err = cylinder_law(&params, &mut exact)?;
    let sph_err = sphere_law(params.n(), &mut exact)?;
    out.tables.push(exact);
    out.metric("cylinder_law_error", cyl_err);
    out.metric("sphere_law_error", sph_err);
    out.check(
        "exact shrinking solutions",
        cyl_err <= EXACT_TOL && sph_err <= EXACT_TOL,
        format!("cylinder {cyl_err:.3e}, sphere {sph_err:.3e} relative over half the lifespan"),
    );

    let mut prof = neckpinch_initial(&params, cfg.tau0, cfg.extent, cfg.grid_points)?;
    let step_cfg = StepperConfig::new(cfg.dt)?.with_boundary(BoundaryMode::Neumann);
    let mut trace = FlowTrace {
        rescaled: false,
        records: vec![flow_record(&prof)],
        profiles: Vec::new(),
        minima: vec![(prof.time().value(), prof.min().1)],
        termination: Termination::PinchThreshold,
    };
    let mut previous = prof.clone();
    let mut steps = 0usize;
    while prof.min().1 >= STOP_RADIUS {
        if cfg.horizon > 0.0 && prof.time().value() >= cfg.horizon {
            trace.termination = Termination::Horizon;
            break;
        }
        let dt = (STEP_FACTOR * prof.min().1.powi(2)).min(cfg.dt);
        let next = match mcf_step_dt(&prof, &step_cfg, dt) {
            Ok(p) => p,
            Err(e) => {
                trace.termination = Termination::Stopped(e.to_string());
                break;
            }
        };
        previous = std::mem::replace(&mut prof, next);
        steps += 1;
        trace.minima.push((prof.time().value(), prof.min().1));
        if steps.is_multiple_of(200) {
            trace.records.push(flow_record(&prof));
        }
    }
    trace.records.push(flow_record(&prof));
    out.tables.push(trace_table("neckpinch_trace", &trace));

    let pinch = detect_pinch(&trace);
    out.metric("steps", steps as f64);
    out.metric("singular_time", pinch.singular_time);
    out.metric("pinch_rate", pinch.rate);
    out.metric("final_min_v", prof.min().1);
    if pinch.status != PinchStatus::Found || steps == 0 {
        out.check(
            "cusp profile",
            false,
            format!("no pinch detected ({:?})", trace.termination),
        );
        return Ok(out);
    }

    // v(y, T) by linear extrapolation in time from the last two profiles
    let span = prof.time().value() - previous.time().value();
    let lead = pinch.singular_time - prof.time().value();
    let mut ratios = Table::new("cusp_ratio", &["y", "v_at_T", "cusp", "ratio"]);
    let mut samples = Vec::new();
    for y in RATIO_YS {
        let (Some(a), Some(b)) = (previous.interpolate(y), prof.interpolate(y)) else {
            bail!("ratio window y = {y} lies outside the grid");
        };
        let v = b + (b - a) / span * lead;
        let ratio = cusp_ratio(v, y, rho);
        ratios.push(vec![
            y.into(),
            v.into(),
            (rho * y / (2.0 * (-y.ln()).sqrt())).into(),
            ratio.into(),
        ]);
        samples.push((y, ratio));
    }
    out.tables.push(ratios);

    let in_band = samples.iter().all(|(_, r)| (0.7..=1.3).contains(r));
    let window_mean = |top: f64| {
        let w: Vec<f64> = samples
            .iter()
            .filter(|(y, _)| *y <= top + 1e-12)
            .map(|s| s.1)
            .collect();
        w.iter().sum::<f64>() / w.len() as f64
    };
    let (wide, narrow) = (window_mean(0.1), window_mean(0.05));
    let toward_one = (narrow - 1.0).abs() < (wide - 1.0).abs();
    let lo = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let hi = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    out.metric("ratio_min", lo);
    out.metric("ratio_max", hi);
    out.metric("window_mean_0.1", wide);
    out.metric("window_mean_0.05", narrow);
    out.check(
        "cusp profile",
        in_band && toward_one,
        format!("ratio in [{lo:.4}, {hi:.4}] on [0.02, 0.1]; window means {wide:.4} (0.1) and {narrow:.4} (0.05)"),
    );
    Ok(out)
}

pub(super) fn cusp_restart(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let mut w = DualProfile::from_cusp(params, cfg.grid_points)?;
    let mut out = Outcome::default();
    let mut table = Table::new("dual_trace", &["t", "w0", "min_increment", "monotone"]);
    let row = |w: &DualProfile, monotone: bool| {
        let v = w.values();
        let inc = v
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::INFINITY, f64::min);
        vec![w.time().into(), v[0].into(), inc.into(), monotone.into()]
    };
    let initial_ok = normal_sign_condition(&w);
    table.push(row(&w, initial_ok));
    let mut flags = usize::from(!initial_ok);
    let mut steps = 0usize;
    let sample = ((cfg.horizon / cfg.dt / 100.0).round() as usize).max(1);
    while w.time() < cfg.horizon - 1e-12 {
        let dt = cfg.dt.min(cfg.horizon - w.time());
        let step = post_singular_step(&w, dt, TimeScheme::Ros2)?;
        steps += 1;
        if !step.monotone {
            flags += 1;
        }
        w = step.profile;
        if steps.is_multiple_of(sample) || !step.monotone {
            table.push(row(&w, step.monotone));
        }
    }
    out.tables.push(table);
    out.metric("steps", steps as f64);
    out.metric("monotonicity_flags", flags as f64);
    out.metric("final_w0", w.values()[0]);
    out.check(
        "post-singular graphicality",
        flags == 0,
        format!(
            "{flags} monotonicity-loss flags over {steps} steps to t = {:.4}",
            w.time()
        ),
    );
    Ok(out)
}
