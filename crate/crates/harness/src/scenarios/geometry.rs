//! Noncollapsing constants, the bowl translator and surgery bookkeeping.

use anyhow::{bail, Result};
use neckflow::diagnostics::{noncollapse_alpha, surgery_euler_delta, GeneratingCurve};
use neckflow::flow::{
    bowl_translator_solve, polar_mcf_step, tail_exponent, CoordinateKind, PolarProfile,
    RadialProfile, TimeScheme, TimeStamp,
};
use neckflow::Execution;

use super::{cylinder, Outcome};
use crate::config::RunConfig;
use crate::output::Table;

/// Relative agreement required of `alpha` under grid refinement.
const REFINEMENT_TOL: f64 = 0.05;
/// Polar runs stop once the mean radius falls to this fraction of its start.
const POLAR_STOP: f64 = 0.3;
const BOWL_DIMS: [usize; 3] = [2, 3, 6];
const BOWL_TAIL: [f64; 5] = [4.0, 8.0, 16.0, 32.0, 64.0];

fn ellipsoid(n: usize, cells: usize) -> Result<PolarProfile> {
    Ok(PolarProfile::from_fn(n, cells, 0.0, |phi| {
        1.0 + 0.2 * phi.cos().powi(2)
    })?)
}

fn polar_alpha(p: &PolarProfile) -> Result<f64> {
    Ok(noncollapse_alpha(&GeneratingCurve::from_polar(p), Execution::default())?.alpha)
}

pub(super) fn noncollapse(cfg: &RunConfig) -> Result<Outcome> {
    let params = cylinder(cfg)?;
    let n = params.n();
    let mut out = Outcome::default();

    let sphere = polar_alpha(&PolarProfile::sphere(n, 1.0, cfg.grid_points)?)?;
    let kind = if params.k() == 1 {
        CoordinateKind::Axis
    } else {
        CoordinateKind::Radial
    };
    let cyl = RadialProfile::from_fn(
        params,
        kind,
        cfg.extent,
        cfg.grid_points,
        TimeStamp::Rescaled(0.0),
        |_| params.rho(),
    )?;
    let cyl = noncollapse_alpha(
        &GeneratingCurve::from_profile(&cyl, cfg.extent)?,
        Execution::default(),
    )?
    .alpha;
    out.metric("alpha_sphere", sphere);
    out.metric("alpha_cylinder", cyl);
    let exact_ok = (sphere - n as f64).abs() <= 1e-6 * n as f64
        && (cyl - (n - params.k()) as f64).abs() <= 1e-6 * n as f64;
    out.check(
        "noncollapsing constant of exact shrinkers",
        exact_ok,
        format!(
            "sphere {sphere:.8} (exact {n}), cylinder {cyl:.8} (exact {})",
            n - params.k()
        ),
    );

    let mut table = Table::new("alpha_trace", &["t", "mean_radius", "H_min", "alpha"]);
    let mut p = ellipsoid(n, cfg.grid_points)?;
    let r0 = p.mean_radius();
    let mut alpha_min = f64::INFINITY;
    let mut steps = 0usize;
    loop {
        let report = noncollapse_alpha(&GeneratingCurve::from_polar(&p), Execution::default())?;
        alpha_min = alpha_min.min(report.alpha);
        if steps.is_multiple_of(10) {
            table.push(vec![
                p.time().into(),
                p.mean_radius().into(),
                report.h_min.into(),
                report.alpha.into(),
            ]);
        }
        if p.time() >= cfg.horizon - 1e-12 || p.mean_radius() < POLAR_STOP * r0 {
            break;
        }
        let dt = cfg
            .dt
            .min(0.05 * p.mean_radius().powi(2))
            .min(cfg.horizon - p.time());
        p = polar_mcf_step(&p, dt, TimeScheme::Ros2)?;
        steps += 1;
    }
    out.tables.push(table);
    out.metric("alpha_min_ellipsoid", alpha_min);

    let coarse = polar_alpha(&ellipsoid(n, cfg.grid_points)?)?;
    let fine = polar_alpha(&ellipsoid(n, 2 * cfg.grid_points)?)?;
    let drift = (fine / coarse - 1.0).abs();
    out.metric("alpha_refinement_drift", drift);
    out.check(
        "noncollapsing along a convex flow",
        alpha_min > 0.0 && drift <= REFINEMENT_TOL,
        format!("min alpha {alpha_min:.4} over {steps} steps; refinement drift {drift:.2e}"),
    );
    Ok(out)
}

pub(super) fn bowl_ode(cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut gaps = Table::new("bowl_gap", &["m", "s", "U", "gap"]);
    let mut fits = Table::new("bowl_tail", &["m", "convex", "cauchy", "exponent"]);
    let mut all_ok = true;
    let mut details = Vec::new();
    for m in BOWL_DIMS {
        let b = bowl_translator_solve(m, cfg.extent, cfg.grid_points)?;
        let stride = (b.s.len() / 260).max(1);
        for ((s, u), (_, g)) in
            b.s.iter()
                .zip(&b.u)
                .skip(1)
                .zip(b.asymptotic_gap())
                .step_by(stride)
        {
            gaps.push(vec![m.into(), (*s).into(), (*u).into(), g.into()]);
        }
        let diffs: Vec<f64> = BOWL_TAIL
            .iter()
            .map(|s| Some((b.gap_at(2.0 * s)? - b.gap_at(*s)?).abs()))
            .collect::<Option<Vec<_>>>()
            .unwrap_or_default();
        let cauchy = diffs.len() == BOWL_TAIL.len() && diffs.windows(2).all(|w| w[1] < w[0]);
        let Some(exponent) = tail_exponent(&b, &BOWL_TAIL) else {
            bail!(
                "bowl grid for m = {m} does not reach s = {}",
                2.0 * BOWL_TAIL[BOWL_TAIL.len() - 1]
            );
        };
        let convex = b.is_convex();
        fits.push(vec![
            m.into(),
            convex.into(),
            cauchy.into(),
            exponent.into(),
        ]);
        out.metric(&format!("tail_exponent_m{m}"), exponent);
        all_ok &= convex && cauchy && (exponent + 1.0).abs() <= 0.3;
        details.push(format!(
            "m = {m}: convex {convex}, Cauchy {cauchy}, exponent {exponent:.3}"
        ));
    }
    out.tables.push(gaps);
    out.tables.push(fits);
    out.check("bowl translator", all_ok, details.join("; "));
    Ok(out)
}

/// `χ(S^d)` as the alternating face count of the boundary of a `(d+1)`-cube.
fn cube_boundary_euler(d: usize) -> i64 {
    let dim = d + 1;
    let mut binom = 1i64;
    let mut chi = 0i64;
    for i in 0..dim {
        // faces of dimension i: C(dim, i) 2^(dim - i)
        let faces = binom * (1i64 << (dim - i));
        chi += if i % 2 == 0 { faces } else { -faces };
        binom = binom * (dim - i) as i64 / (i + 1) as i64;
    }
    chi
}

pub(super) fn surgery_table(_cfg: &RunConfig) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut table = Table::new("surgery", &["n", "k", "delta_chi", "independent", "match"]);
    let mut mismatches = 0usize;
    for n in 2..=7usize {
        for k in 1..n {
            let got = surgery_euler_delta(n, k)?;
            let want = cube_boundary_euler(k - 1) - cube_boundary_euler(n - k);
            mismatches += usize::from(got != want);
            table.push(vec![
                n.into(),
                k.into(),
                got.into(),
                want.into(),
                (got == want).into(),
            ]);
        }
    }
    let base = surgery_euler_delta(2, 1)?;
    out.tables.push(table);
    out.metric("mismatches", mismatches as f64);
    out.metric("delta_chi_2_1", base as f64);
    out.check(
        "surgery bookkeeping",
        mismatches == 0 && base == 2,
        format!("{mismatches} mismatches for 2 <= n <= 7; (2,1) gives {base:+}"),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_count_gives_sphere_euler() {
        assert_eq!(cube_boundary_euler(0), 2);
        assert_eq!(cube_boundary_euler(1), 0);
        assert_eq!(cube_boundary_euler(2), 2);
        assert_eq!(cube_boundary_euler(5), 0);
    }
}
