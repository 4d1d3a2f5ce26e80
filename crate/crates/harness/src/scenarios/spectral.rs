//! Spectrum of the Jacobi operator and decay orders of linear solutions.

use std::time::Instant;

use anyhow::Result;
use neckflow::flow::{jacobi_step, BoundaryMode, CoordinateKind, JacobiGrid, TimeScheme};
use neckflow::spectral::{
    enumerate_spectrum, linear_decay_order, sphere_multiplicity, theta_invariant_lowest, BasisKey,
    EigenExpansion, JacobiField, NormSeries, SymmetryClass, YClass, YMode,
};
use neckflow::{CylinderParams, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cylinder, fit_slope, Outcome};
use crate::config::RunConfig;
use crate::output::Table;

const LOWEST: [f64; 3] = [-1.0, -0.5, 0.0];

pub(super) fn spectrum_validate(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let mut out = Outcome::default();

    let mut table = Table::new("eigen_table", &["i", "j", "eigenvalue", "multiplicity"]);
    for entry in enumerate_spectrum(&params, 1.0, SymmetryClass::Full)? {
        for (mode, m) in &entry.modes {
            table.push(vec![
                (mode.i as usize).into(),
                (mode.j as usize).into(),
                mode.eigenvalue.into(),
                (*m).into(),
            ]);
        }
    }
    out.tables.push(table);

    let mut levels: Vec<usize> = [250, 500, 1000]
        .into_iter()
        .filter(|p| *p < cfg.grid_points)
        .collect();
    levels.push(cfg.grid_points);
    let mut disc = Table::new(
        "discrete_eigenvalues",
        &["points", "index", "computed", "exact", "error"],
    );
    let mut errors = Vec::new();
    let mut finest_time = 0.0;
    for &points in &levels {
        let start = Instant::now();
        let ev = theta_invariant_lowest(&params, points, cfg.extent, 3)?;
        finest_time = start.elapsed().as_secs_f64();
        let mut worst = 0.0f64;
        for (i, (got, want)) in ev.iter().zip(LOWEST).enumerate() {
            let err = (got - want).abs();
            worst = worst.max(err);
            disc.push(vec![
                points.into(),
                i.into(),
                (*got).into(),
                want.into(),
                err.into(),
            ]);
        }
        errors.push((points as f64, worst));
    }
    out.tables.push(disc);

    let max_error = errors.last().map(|e| e.1).unwrap_or(f64::NAN);
    let pts: Vec<(f64, f64)> = errors
        .iter()
        .filter(|e| e.1 > 0.0)
        .map(|(p, e)| (p.ln(), e.ln()))
        .collect();
    let order = if pts.len() >= 2 {
        -fit_slope(&pts)
    } else {
        f64::NAN
    };
    out.metric("max_error", max_error);
    out.metric("order", order);
    out.metric("runtime_s", finest_time);
    out.check(
        "lowest eigenvalues {-1, -1/2, 0}",
        max_error < 1e-3 && order >= 1.8 && finest_time < 10.0,
        format!(
            "max error {max_error:.3e} at {} points, order {order:.3}, {finest_time:.3} s",
            cfg.grid_points
        ),
    );
    Ok(out)
}

/// Basis keys of `theta`-invariant and first spherical-level modes up to `degree`.
fn mixture_keys(params: &CylinderParams, degree: u32) -> Vec<BasisKey> {
    let ys: Vec<YMode> = if params.k() == 1 {
        (0..=degree).map(YMode::Hermite).collect()
    } else {
        (0..=degree / 2)
            .map(YMode::Radial)
            .chain((0..=(degree - 1) / 2).map(YMode::Linear))
            .collect()
    };
    let mut keys = Vec::new();
    for level in 0..2u32 {
        if sphere_multiplicity(level, params.sphere_dim()) == 0 {
            continue;
        }
        keys.extend(ys.iter().map(|y| BasisKey {
            sphere_level: level,
            sphere_index: 0,
            y: *y,
        }));
    }
    keys
}

struct MixtureResult {
    mean_zero: bool,
    pure: Option<f64>,
    orders: Vec<(f64, f64)>,
}

fn random_mixture(
    params: &CylinderParams,
    keys: &[BasisKey],
    seed: u64,
    run: usize,
) -> Result<(EigenExpansion, bool, Option<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(run as u64),
    );
    let kind = run % 4;
    let mut terms: Vec<(BasisKey, f64)> = Vec::new();
    if kind == 3 {
        // a single mode
        let key = keys[rng.gen_range(0..keys.len())];
        terms.push((key, rng.gen_range(0.1..2.0)));
        let e = EigenExpansion::new(*params, terms)?;
        let gamma = key.eigenvalue(params);
        return Ok((e, gamma > -1.0 + 1e-12, Some(gamma)));
    }
    let mean_zero = kind == 2;
    for key in keys {
        if mean_zero && key.eigenvalue(params) < -1.0 + 1e-12 {
            continue;
        }
        if rng.gen_bool(0.6) {
            terms.push((*key, rng.gen_range(-1.0..1.0)));
        }
    }
    if terms.is_empty() {
        terms.push((keys[keys.len() - 1], 1.0));
    }
    Ok((EigenExpansion::new(*params, terms)?, mean_zero, None))
}

pub(super) fn jacobi_decay(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let keys = mixture_keys(&params, 5);
    let start = Instant::now();
    let taus: Vec<f64> = (0..=(cfg.horizon * 4.0).round() as usize)
        .map(|i| i as f64 * 0.25)
        .collect();
    let results = Execution::default().map_range(cfg.runs, |run| -> Result<MixtureResult> {
        let (e, mean_zero, pure) = random_mixture(&params, &keys, cfg.seed, run)?;
        let field = JacobiField::Spectral(e);
        let orders = taus
            .iter()
            .map(|t| Ok((*t, linear_decay_order(&field, *t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixtureResult {
            mean_zero,
            pure,
            orders,
        })
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let elapsed = start.elapsed().as_secs_f64();

    let mut out = Outcome::default();
    let mut summary = Table::new(
        "mixtures",
        &["run", "kind", "n_first", "n_last", "n_min", "max_increase"],
    );
    let mut trace = Table::new("decay_orders", &["run", "tau", "N"]);
    let (mut violations, mut floor, mut floor_mean_zero, mut pure_dev) =
        (0usize, f64::INFINITY, f64::INFINITY, 0.0f64);
    for (run, r) in results.iter().enumerate() {
        let ns: Vec<f64> = r.orders.iter().map(|o| o.1).collect();
        let max_increase = ns
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        if max_increase > 1e-9 {
            violations += 1;
        }
        let n_min = ns.iter().copied().fold(f64::INFINITY, f64::min);
        floor = floor.min(n_min);
        if r.mean_zero {
            floor_mean_zero = floor_mean_zero.min(n_min);
        }
        if let Some(g) = r.pure {
            pure_dev = pure_dev.max(ns.iter().map(|n| (n - g).abs()).fold(0.0, f64::max));
        }
        let kind = match (r.pure, r.mean_zero) {
            (Some(_), _) => "pure",
            (None, true) => "mean-zero",
            (None, false) => "mixture",
        };
        summary.push(vec![
            run.into(),
            kind.into(),
            ns[0].into(),
            ns[ns.len() - 1].into(),
            n_min.into(),
            max_increase.into(),
        ]);
        if run < 10 {
            for (t, n) in &r.orders {
                trace.push(vec![run.into(), (*t).into(), (*n).into()]);
            }
        }
    }

    // grid route: the sampled decay order of one mixture against its spectral value
    let grid_dev = grid_cross_check(&params, &keys, cfg)?;

    out.tables.push(summary);
    out.tables.push(trace);
    out.metric("runs", cfg.runs as f64);
    out.metric("monotonicity_violations", violations as f64);
    out.metric("floor", floor);
    out.metric("floor_mean_zero", floor_mean_zero);
    out.metric("pure_mode_deviation", pure_dev);
    out.metric("grid_route_deviation", grid_dev);
    out.metric("runtime_s", elapsed);
    out.check(
        "linear decay order",
        violations == 0
            && floor >= -1.0 - 1e-9
            && floor_mean_zero >= -0.5 - 1e-9
            && pure_dev <= 1e-9
            && elapsed < 5.0,
        format!(
            "{violations} non-monotone runs, floor {floor:.12}, mean-zero floor {floor_mean_zero:.12}, pure deviation {pure_dev:.2e}, {elapsed:.3} s"
        ),
    );
    Ok(out)
}

/// Largest gap between grid and spectral decay orders for one `theta`-invariant mixture.
fn grid_cross_check(params: &CylinderParams, keys: &[BasisKey], cfg: &RunConfig) -> Result<f64> {
    let wanted = if params.k() == 1 {
        YClass::Line
    } else {
        YClass::Radial
    };
    let inv: Vec<BasisKey> = keys
        .iter()
        .copied()
        .filter(|k| k.sphere_level == 0 && k.y.class() == wanted)
        .take(4)
        .collect();
    let coeffs = [0.2, 1.0, -0.5, 0.3];
    let terms: Vec<(BasisKey, f64)> = inv.iter().zip(coeffs).map(|(k, c)| (*k, c)).collect();
    let e = EigenExpansion::new(*params, terms)?;
    let kind = if params.k() == 1 {
        CoordinateKind::Axis
    } else {
        CoordinateKind::Radial
    };
    let mut grid = JacobiGrid::from_fn(
        *params,
        kind,
        cfg.extent.max(12.0),
        cfg.grid_points.max(481),
        |s| e.eval_reduced(s),
    )?;
    let dt = 0.01;
    let mut series = NormSeries {
        taus: vec![0.0],
        norms: vec![grid.weighted_norm()],
    };
    for _ in 0..300 {
        grid = jacobi_step(&grid, dt, BoundaryMode::Neumann, TimeScheme::Ros2)?;
        series.taus.push(grid.tau());
        series.norms.push(grid.weighted_norm());
    }
    let sampled = JacobiField::Sampled(series);
    let spectral = JacobiField::Spectral(e);
    let mut dev = 0.0f64;
    for i in 0..=4 {
        let t = i as f64 * 0.5;
        dev = dev.max((linear_decay_order(&sampled, t)? - linear_decay_order(&spectral, t)?).abs());
    }
    Ok(dev)
}
