//! Mode content of a graph: h1-domination and eigenspace fractions.

use crate::cylinder::{unit_sphere_area, GraphPatch, GraphSurface, PatchDomain};
use crate::error::{domain, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::spectral::{sphere_weight, weighted_project, Relation, YClass};

/// Weighted integral of `f` over `[a, b]` in the patch's reduced measure,
/// including the sphere factor. `linear` applies the `1/k` angular average
/// of `(y·ŷ)^2`.
fn reduced_integral(
    patch: &GraphPatch,
    a: f64,
    b: f64,
    linear: bool,
    f: impl Fn(f64) -> f64,
) -> f64 {
    let params = patch.params();
    let k = params.k();
    let gl = GaussLegendre::new(20);
    let panels = ((b - a) * 4.0).ceil().max(1.0) as usize;
    let sw = sphere_weight(params);
    match patch.domain() {
        PatchDomain::Line { .. } => {
            sw * gl.integrate(|y| f(y) * (-y * y / 4.0).exp(), a, b, panels)
        }
        PatchDomain::Radial => {
            let ang = unit_sphere_area(k - 1) / if linear { k as f64 } else { 1.0 };
            sw * ang
                * gl.integrate(
                    |r| f(r) * r.powi(k as i32 - 1) * (-r * r / 4.0).exp(),
                    a,
                    b,
                    panels,
                )
        }
    }
}

fn patch_interval(patch: &GraphPatch) -> (f64, f64) {
    let last = patch.samples().len() - 1;
    (patch.coordinate(0), patch.coordinate(last))
}

/// Integration range standing in for the whole spine.
const SPINE_EXTENT: f64 = 40.0;

/// `inf_{c > 0, c'} ||u/c - c' - y·ŷ||` in the weighted `L^2` norm, with `u`
/// extended by zero outside its patch.
pub fn h1_domination(u: &GraphPatch, yhat: &[f64]) -> Result<f64> {
    let k = u.params().k();
    if yhat.len() != k {
        return domain(format!("direction must have {k} components"));
    }
    let norm = yhat.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return domain("direction must be nonzero");
    }
    let (a, b) = patch_interval(u);
    let val = |s: f64| u.eval_reduced(s).0;
    let uu = reduced_integral(u, a, b, false, |s| val(s) * val(s));
    if !(uu > 0.0) {
        return Err(Error::Undefined("h1 domination of the zero graph".into()));
    }
    let u1 = reduced_integral(u, a, b, false, val);
    let (one, ul, l1, ll) = match u.domain() {
        PatchDomain::Line { .. } => {
            let dir = yhat[0] / norm;
            let e = SPINE_EXTENT;
            (
                reduced_integral(u, -e, e, false, |_| 1.0),
                reduced_integral(u, a, b, false, |s| val(s) * dir * s),
                0.0,
                reduced_integral(u, -e, e, false, |s| s * s),
            )
        }
        // radial heights are orthogonal to every linear function
        PatchDomain::Radial => (
            reduced_integral(u, 0.0, SPINE_EXTENT, false, |_| 1.0),
            0.0,
            0.0,
            reduced_integral(u, 0.0, SPINE_EXTENT, true, |s| s * s),
        ),
    };
    // remove constants, then optimise the positive scale
    let p = uu - u1 * u1 / one;
    let q = ul - u1 * l1 / one;
    let lp = ll - l1 * l1 / one;
    let f = if q > 0.0 && p > 0.0 {
        lp - q * q / p
    } else {
        lp
    };
    Ok(f.max(0.0).sqrt())
}

/// `||Π u|| / ||u||` for the eigenspaces `λ relation gamma`.
pub fn mode_fraction(u: &GraphPatch, gamma: f64, relation: Relation) -> Result<f64> {
    mode_fraction_with(u, gamma, relation, 30)
}

/// [`mode_fraction`] with an explicit truncation degree for the projection.
pub fn mode_fraction_with(
    u: &GraphPatch,
    gamma: f64,
    relation: Relation,
    truncation_degree: u32,
) -> Result<f64> {
    let params = *u.params();
    let (a, b) = patch_interval(u);
    let val = |s: f64| u.eval_reduced(s).0;
    let uu = reduced_integral(u, a, b, false, |s| val(s) * val(s));
    if !(uu > 0.0) {
        return Err(Error::Undefined("mode fraction of the zero graph".into()));
    }
    let class = match u.domain() {
        PatchDomain::Line { .. } => YClass::Line,
        PatchDomain::Radial => YClass::Radial,
    };
    let length = a.abs().max(b.abs()).max(1.0);
    let proj = weighted_project(
        &params,
        class,
        val,
        gamma,
        relation,
        truncation_degree,
        length,
    )?;
    Ok((proj.component.norm() / uu.sqrt()).clamp(0.0, 1.0))
}
