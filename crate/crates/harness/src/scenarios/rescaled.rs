//! Rescaled flow: the shrinker fixed point, the nondegenerate run and its
//! normal form, decay orders, the monotonicity sweep and non-concentration.

use std::time::Instant;

use anyhow::Result;
use neckflow::diagnostics::{
    annotate_trace, decay_order, monotonicity_sweep as sweep_trace, nonconcentration_check,
    restricted_decay_fit, DecaySeries, NonconcentrationReport, SweepConfig, Verdict,
};
use neckflow::flow::{
    nondegenerate_initial, rmcf_step, run_flow, BoundaryMode, CoordinateKind, FlowTrace,
    RadialProfile, RunOptions, StepperConfig, TimeStamp,
};
use neckflow::spectral::{spectrum_values, YMode};
use neckflow::{CylinderParams, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cylinder, fit_slope, trace_table, Outcome};
use crate::config::RunConfig;
use crate::output::{Cell, Table};

const FIXED_POINT_STEPS: usize = 10_000;
const FIXED_POINT_TOL: f64 = 1e-12;
/// Box radii of the restricted decay orders.
const RADII: [f64; 4] = [4.0, 6.0, 8.0, 12.0];
/// Start of the window in which the normal form and decay order are judged.
const LATE_TAU: f64 = 50.0;
/// The normal form is measured on `|y| <= NORMAL_FORM_RADIUS`.
const NORMAL_FORM_RADIUS: f64 = 2.0;
const SAMPLE_EVERY: f64 = 0.5;
/// Sweep settings.
const SWEEP_EPSILON: f64 = 0.05;
const SWEEP_CLOSENESS: f64 = 0.5;
const SWEEP_SPECTRUM_CUTOFF: f64 = 4.0;
const SWEEP_AMPLITUDE: f64 = 1e-3;
const SWEEP_MODES: u32 = 6;
const SWEEP_SAMPLE: f64 = 0.1;

/// Largest per-step change of `v ≡ rho` under the rescaled step.
fn fixed_point_drift(params: &CylinderParams, cfg: &RunConfig) -> Result<(f64, f64)> {
    let rho = params.rho();
    let kind = if params.k() == 1 {
        CoordinateKind::Axis
    } else {
        CoordinateKind::Radial
    };
    let mut prof = RadialProfile::from_fn(
        *params,
        kind,
        cfg.extent,
        cfg.grid_points,
        TimeStamp::Rescaled(0.0),
        |_| rho,
    )?;
    let step = StepperConfig::new(cfg.dt)?.with_boundary(BoundaryMode::Neumann);
    let (mut per_step, mut total) = (0.0f64, 0.0f64);
    for _ in 0..FIXED_POINT_STEPS {
        let next = rmcf_step(&prof, &step)?;
        for (a, b) in next.values().iter().zip(prof.values()) {
            per_step = per_step.max((a - b).abs());
            total = total.max((a - rho).abs());
        }
        prof = next;
    }
    Ok((per_step, total))
}

/// The nondegenerate run with stored profiles, annotated with `d` and `alpha`.
fn nondegenerate_trace(params: &CylinderParams, cfg: &RunConfig) -> Result<FlowTrace> {
    let initial = nondegenerate_initial(params, cfg.tau0, cfg.extent, cfg.grid_points)?;
    let step = StepperConfig::new(cfg.dt)?.with_mode_control(true);
    let opts = RunOptions {
        horizon: cfg.horizon,
        sample_every: SAMPLE_EVERY,
        keep_profiles: true,
    };
    let mut trace = run_flow(&initial, &step, &opts)?;
    annotate_trace(&mut trace, cfg.extent, Execution::default())?;
    Ok(trace)
}

/// `sup |tau u - (rho/4)(|y|^2 - 2k)|` and `sup |u - rho (|y|^2 - 2k)/(4 tau)|` over `|y| <= 2`.
fn normal_form(p: &RadialProfile) -> (f64, f64) {
    let params = p.params();
    let (rho, k) = (params.rho(), params.k() as f64);
    let tau = p.time().value();
    let (mut scaled, mut residual) = (0.0f64, 0.0f64);
    for (i, v) in p.values().iter().enumerate() {
        let y = p.coordinate(i);
        if y.abs() > NORMAL_FORM_RADIUS + 1e-12 {
            continue;
        }
        let u = v - rho;
        let model = rho / 4.0 * (y * y - 2.0 * k);
        scaled = scaled.max((tau * u - model).abs());
        residual = residual.max((u - model / tau).abs());
    }
    (scaled, residual)
}

fn is_integer(t: f64) -> bool {
    (t - t.round()).abs() < 1e-9
}

pub(super) fn nondegenerate_rmcf(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let mut out = Outcome::default();

    let (per_step, total) = fixed_point_drift(&params, cfg)?;
    out.metric("fixed_point_step_change", per_step);
    out.metric("fixed_point_deviation", total);
    out.check(
        "shrinker fixed point",
        per_step <= FIXED_POINT_TOL,
        format!(
            "largest change {per_step:.3e} per step, {total:.3e} after {FIXED_POINT_STEPS} steps"
        ),
    );

    let start = Instant::now();
    let trace = nondegenerate_trace(&params, cfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    out.metric("runtime_s", elapsed);
    out.metric(
        "final_tau",
        trace.records.last().map_or(f64::NAN, |r| r.time),
    );
    out.tables.push(trace_table("trace", &trace));
    let end = cfg.horizon;
    let reached = trace.records.last().is_some_and(|r| r.time >= end - 1e-9);

    // normal form
    let mut nf = Table::new("normal_form", &["tau", "scaled_deviation", "residual"]);
    let mut late = Vec::new();
    for p in trace
        .profiles
        .iter()
        .filter(|p| is_integer(p.time().value()))
    {
        let (scaled, residual) = normal_form(p);
        let tau = p.time().value();
        nf.push(vec![tau.into(), scaled.into(), residual.into()]);
        if tau >= LATE_TAU - 1e-9 {
            late.push((tau, scaled, residual));
        }
    }
    out.tables.push(nf);
    let decreasing = late.len() >= 2 && late.windows(2).all(|w| w[1].1 < w[0].1);
    let fit_pts: Vec<(f64, f64)> = late
        .iter()
        .filter(|l| l.2 > 0.0)
        .map(|l| (l.0.ln(), l.2.ln()))
        .collect();
    let slope = if fit_pts.len() >= 2 {
        fit_slope(&fit_pts)
    } else {
        f64::NAN
    };
    out.metric("normal_form_slope", slope);
    out.check(
        "normal form",
        reached && decreasing && slope <= -1.5 && elapsed < 120.0,
        format!(
            "scaled deviation decreasing on [{LATE_TAU}, {end}]: {decreasing}; residual slope {slope:.3}; {elapsed:.2} s"
        ),
    );

    // decay orders
    let full = DecaySeries::from_trace(&trace, None)?;
    let restricted = RADII
        .iter()
        .map(|r| DecaySeries::from_trace(&trace, Some(*r)))
        .collect::<neckflow::Result<Vec<_>>>()?;
    let mut decay = Table::new("decay", &["tau", "d", "N", "R", "d_R", "N_R"]);
    for (i, (tau, d)) in full.samples.iter().enumerate() {
        let n: Cell = decay_order(&full, *tau).ok().into();
        for s in &restricted {
            let (_, dr) = s.samples[i];
            let nr: Cell = decay_order(s, *tau).ok().into();
            decay.push(vec![
                (*tau).into(),
                (*d).into(),
                n.clone(),
                s.radius.into(),
                dr.into(),
                nr,
            ]);
        }
    }
    out.tables.push(decay);
    let late_orders: Vec<(f64, f64)> = full
        .orders()
        .into_iter()
        .filter(|(t, _)| *t >= LATE_TAU - 1e-9)
        .collect();
    let worst = late_orders.iter().map(|o| o.1.abs()).fold(0.0, f64::max);
    out.metric("late_decay_order_max", worst);
    out.check(
        "decay order of the nondegenerate run",
        reached && !late_orders.is_empty() && worst < 0.1,
        format!(
            "max |N| = {worst:.4e} over {} samples with tau >= {LATE_TAU}",
            late_orders.len()
        ),
    );

    let mut exps = Vec::new();
    for offset in [1.0, 2.0] {
        let tau = trace.records[0].time + offset;
        let fit = restricted_decay_fit(&full, &restricted, tau)?;
        out.metric(&format!("restricted_exponent_tau0+{offset}"), fit.exponent);
        out.metric(&format!("restricted_r0_tau0+{offset}"), fit.r0);
        exps.push(fit.exponent);
    }
    out.check(
        "restricted decay order",
        exps.iter().all(|e| (e + 2.0).abs() <= 0.5),
        format!(
            "exponents {:.3} and {:.3} at tau0 + 1 and tau0 + 2",
            exps[0], exps[1]
        ),
    );

    // mean convexity and noncollapsing after the initial transient
    let after: Vec<_> = trace
        .records
        .iter()
        .filter(|r| r.time >= cfg.tau0 + 1.0 - 1e-9)
        .collect();
    let h_min = after.iter().map(|r| r.h_min).fold(f64::INFINITY, f64::min);
    let alpha_min = after
        .iter()
        .map(|r| r.alpha.unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    out.metric("h_min", h_min);
    out.metric("alpha_min", alpha_min);
    out.check(
        "mean convexity and noncollapsing",
        !after.is_empty() && h_min > 0.0 && alpha_min > 0.0,
        format!("min H {h_min:.4e}, min alpha {alpha_min:.4} after tau0 + 1"),
    );
    Ok(out)
}

/// Cylinder plus `1e-3` times a random combination of the first six
/// `theta`-invariant modes; mode `j` is damped by `1 / (1 + extent^j)`.
pub fn perturbed_cylinder(
    params: &CylinderParams,
    extent: f64,
    points: usize,
    rng: &mut impl Rng,
) -> Result<RadialProfile> {
    let (kind, modes): (CoordinateKind, Vec<YMode>) = if params.k() == 1 {
        (
            CoordinateKind::Axis,
            (0..SWEEP_MODES).map(YMode::Hermite).collect(),
        )
    } else {
        (
            CoordinateKind::Radial,
            (0..SWEEP_MODES).map(YMode::Radial).collect(),
        )
    };
    let coeffs: Vec<f64> = modes.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let k = params.k();
    let rho = params.rho();
    let f = |y: f64| {
        modes
            .iter()
            .zip(&coeffs)
            .map(|(m, c)| c * m.eval(y, k) / (1.0 + extent.powi(m.degree() as i32)))
            .sum::<f64>()
    };
    Ok(RadialProfile::from_fn(
        *params,
        kind,
        extent,
        points,
        TimeStamp::Rescaled(0.0),
        |y| rho + SWEEP_AMPLITUDE * f(y),
    )?)
}

/// The perturbed-cylinder runs of the sweep.
fn sweep_traces(params: &CylinderParams, cfg: &RunConfig) -> Result<Vec<FlowTrace>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial = (0..cfg.runs)
        .map(|_| perturbed_cylinder(params, cfg.extent, cfg.grid_points, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let step = StepperConfig::new(cfg.dt)?.with_boundary(BoundaryMode::Neumann);
    let opts = RunOptions {
        horizon: cfg.horizon,
        sample_every: SWEEP_SAMPLE,
        keep_profiles: true,
    };
    Execution::default()
        .map(&initial, |p| run_flow(p, &step, &opts))
        .into_iter()
        .map(|r| r.map_err(Into::into))
        .collect()
}

pub(super) fn monotonicity_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let spectrum = spectrum_values(&params, SWEEP_SPECTRUM_CUTOFF);
    let sweep_cfg = SweepConfig::new(SWEEP_EPSILON, SWEEP_CLOSENESS, spectrum.clone())?;
    let traces = sweep_traces(&params, cfg)?;
    let mut out = Outcome::default();
    let mut table = Table::new(
        "verdicts",
        &["run", "tau", "N", "N_next", "verdict", "value"],
    );
    let (mut drops, mut locked, mut violations, mut bad_locks) = (0usize, 0usize, 0usize, 0usize);
    for (run, trace) in traces.iter().enumerate() {
        let report = sweep_trace(trace, &sweep_cfg)?;
        for s in &report.steps {
            let (name, value) = match s.verdict {
                Verdict::Drop(d) => {
                    drops += 1;
                    ("drop", d)
                }
                Verdict::SpectrumLocked(g) => {
                    locked += 1;
                    let member = spectrum.iter().any(|l| (l - g).abs() < 1e-12);
                    if !member
                        || (s.order - g).abs() > SWEEP_EPSILON
                        || (s.next_order - g).abs() > SWEEP_EPSILON
                    {
                        bad_locks += 1;
                    }
                    ("locked", g)
                }
                Verdict::Violation => {
                    violations += 1;
                    ("violation", f64::NAN)
                }
            };
            table.push(vec![
                run.into(),
                s.tau.into(),
                s.order.into(),
                s.next_order.into(),
                name.into(),
                value.into(),
            ]);
        }
    }
    out.tables.push(table);
    out.metric("drops", drops as f64);
    out.metric("locked", locked as f64);
    out.metric("violations", violations as f64);
    out.metric("off_spectrum_locks", bad_locks as f64);
    out.check(
        "discrete almost-monotonicity",
        drops + locked > 0 && violations == 0 && bad_locks == 0,
        format!("{drops} drops, {locked} spectrum locks, {violations} violations, {bad_locks} off-spectrum locks over {} runs", cfg.runs),
    );
    Ok(out)
}

fn report_row(table: &mut Table, run: &str, r: &NonconcentrationReport) {
    for ((t, l), q) in r.taus.iter().zip(&r.lhs).zip(&r.ratio) {
        table.push(vec![
            run.into(),
            (*t).into(),
            (*l).into(),
            (*q).into(),
            (r.c * (r.k * t).exp()).into(),
        ]);
    }
}

pub(super) fn nonconcentration(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let mut out = Outcome::default();
    let mut table = Table::new(
        "nonconcentration",
        &["run", "tau", "integral", "ratio", "bound"],
    );
    let mut summary = Table::new("constants", &["run", "C", "K", "holds"]);
    let mut all_ok = true;
    let mut judge = |name: &str, r: &NonconcentrationReport, out: &mut Outcome| {
        let holds = r.c.is_finite()
            && r.k.is_finite()
            && r.taus
                .iter()
                .zip(&r.ratio)
                .all(|(t, q)| *q <= r.c * (r.k * t).exp() * (1.0 + 1e-12));
        all_ok &= holds;
        report_row(&mut table, name, r);
        summary.push(vec![name.into(), r.c.into(), r.k.into(), holds.into()]);
        out.metric(&format!("C_{name}"), r.c);
        out.metric(&format!("K_{name}"), r.k);
    };

    let trace = nondegenerate_trace(&params, cfg)?;
    judge("nondegenerate", &nonconcentration_check(&trace)?, &mut out);

    let sweep = RunConfig {
        scenario: crate::config::Scenario::MonotonicitySweep,
        ..cfg.clone()
    };
    let defaults = RunConfig::for_scenario(sweep.scenario, sweep.cylinder)?;
    let sweep = RunConfig {
        grid_points: defaults.grid_points,
        extent: defaults.extent,
        horizon: defaults.horizon,
        runs: defaults.runs,
        ..sweep
    };
    for (i, t) in sweep_traces(&params, &sweep)?.iter().enumerate() {
        judge(
            &format!("sweep{i:02}"),
            &nonconcentration_check(t)?,
            &mut out,
        );
    }
    out.tables.push(table);
    out.tables.push(summary);
    out.check(
        "non-concentration",
        all_ok,
        format!(
            "finite (C, K) with the bound at every sample on {} runs",
            1 + sweep.runs
        ),
    );
    Ok(out)
}
