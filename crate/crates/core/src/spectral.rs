//! Spectral toolkit for the Jacobi operator `L u = Δu - <y, ∇_y u>/2 + u` on
//! the cylinder `C_{n,k}`.
//!
//! Eigenfunctions factor into a spherical harmonic of level `i` and a Hermite
//! polynomial of total degree `j` in `y`, with eigenvalue of `-L` equal to
//! `mu_i + j/2 - 1`, `mu_i = i (i - 1 + n - k) / (2 (n - k))`.
//!
//! Functions of `y` are handled in three symmetry classes: the full line
//! (`k = 1`), radial functions of `r = |y|`, and the single linear mode
//! `g(r) (y . yhat) / r`. Radial and linear eigenfunctions are generalised
//! Laguerre polynomials in `r^2 / 4`.
//!
//! Weighted inner products are taken against `e^{-|X|^2/4}` on the cylinder,
//! that is `|S^{n-k}(rho)| e^{-rho^2/4} ∫ f g e^{-|y|^2/4} dy` for
//! `theta`-invariant functions. Spherical harmonics are normalised to have the
//! same mean square as the constant.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::cylinder::{unit_sphere_area, CylinderParams};
use crate::error::{domain, Error, Result};
use crate::linalg::SymTridiagonal;
use crate::quadrature::GaussLegendre;

/// Hermite polynomial with `h_0 = 1`, `h_1 = y`, `h_{j+1} = y h_j - 2 j h_{j-1}`.
pub fn hermite_eval(j: u32, y: f64) -> f64 {
    let (mut a, mut b) = (1.0, y);
    if j == 0 {
        return 1.0;
    }
    for m in 1..j {
        let c = y * b - 2.0 * m as f64 * a;
        a = b;
        b = c;
    }
    b
}

/// Generalised Laguerre polynomial `L_m^{(alpha)}(x)`.
pub fn laguerre_eval(m: u32, alpha: f64, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, 1.0 + alpha - x);
    if m == 0 {
        return 1.0;
    }
    for p in 1..m {
        let p = p as f64;
        let c = ((2.0 * p + 1.0 + alpha - x) * b - (p + alpha) * a) / (p + 1.0);
        a = b;
        b = c;
    }
    b
}

/// Eigenvalue of `-Δ` on `S^{n-k}(rho)` at harmonic level `i`.
pub fn sphere_mode_eigenvalue(i: u32, params: &CylinderParams) -> f64 {
    let d = params.sphere_dim() as f64;
    let i = i as f64;
    i * (i - 1.0 + d) / (2.0 * d)
}

/// Dimension of the level-`i` spherical harmonics on `S^d`.
pub fn sphere_multiplicity(i: u32, d: usize) -> usize {
    let i = i as usize;
    let total = binomial(d + i, d);
    if i >= 2 {
        total - binomial(d + i - 2, d)
    } else {
        total
    }
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for t in 0..r {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc as usize
}

/// Number of monomials of total degree `j` in `k` variables.
pub fn hermite_multiplicity(j: u32, k: usize) -> usize {
    binomial(j as usize + k - 1, k - 1)
}

/// One `(i, j)` block of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMode {
    pub i: u32,
    pub j: u32,
    pub eigenvalue: f64,
}

/// One distinct eigenvalue with its total multiplicity and contributing blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    /// Contributing `(i, j)` blocks and their multiplicities.
    pub modes: Vec<(SpectralMode, usize)>,
}

/// Which eigenfunctions are admitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    /// All eigenfunctions.
    Full,
    /// Functions of `y` only (spherical level 0).
    ThetaInvariant,
    /// Functions of `|y|` only.
    Radial,
    /// The single linear mode `g(|y|) (y . yhat) / |y|`.
    Linear,
}

fn mode_multiplicity(i: u32, j: u32, params: &CylinderParams, class: SymmetryClass) -> usize {
    let k = params.k();
    match class {
        SymmetryClass::Full => {
            sphere_multiplicity(i, params.sphere_dim()) * hermite_multiplicity(j, k)
        }
        SymmetryClass::ThetaInvariant if i == 0 => hermite_multiplicity(j, k),
        SymmetryClass::Radial if i == 0 && j.is_multiple_of(2) => 1,
        SymmetryClass::Linear if i == 0 && j % 2 == 1 => 1,
        _ => 0,
    }
}

/// All eigenvalues of `-L` not exceeding `cutoff`, ascending, with multiplicities.
pub fn enumerate_spectrum(
    params: &CylinderParams,
    cutoff: f64,
    class: SymmetryClass,
) -> Result<Vec<SpectrumEntry>> {
    if !(cutoff >= -1.0) {
        return domain("spectrum cutoff must be at least -1");
    }
    let mut blocks = Vec::new();
    let mut i = 0u32;
    while sphere_mode_eigenvalue(i, params) - 1.0 <= cutoff + 1e-12 {
        let mu = sphere_mode_eigenvalue(i, params);
        let mut j = 0u32;
        while mu + j as f64 / 2.0 - 1.0 <= cutoff + 1e-12 {
            let m = mode_multiplicity(i, j, params, class);
            if m > 0 {
                let eigenvalue = mu + j as f64 / 2.0 - 1.0;
                blocks.push((SpectralMode { i, j, eigenvalue }, m));
            }
            j += 1;
        }
        i += 1;
    }
    blocks.sort_by(|a, b| a.0.eigenvalue.total_cmp(&b.0.eigenvalue));
    let mut out: Vec<SpectrumEntry> = Vec::new();
    for (mode, m) in blocks {
        match out.last_mut() {
            Some(e) if (e.eigenvalue - mode.eigenvalue).abs() < 1e-12 => {
                e.multiplicity += m;
                e.modes.push((mode, m));
            }
            _ => out.push(SpectrumEntry {
                eigenvalue: mode.eigenvalue,
                multiplicity: m,
                modes: vec![(mode, m)],
            }),
        }
    }
    Ok(out)
}

/// Distinct eigenvalues of `-L` up to `cutoff` over the full spectrum.
pub fn spectrum_values(params: &CylinderParams, cutoff: f64) -> Vec<f64> {
    enumerate_spectrum(params, cutoff.max(-1.0), SymmetryClass::Full)
        .map(|v| v.into_iter().map(|e| e.eigenvalue).collect())
        .unwrap_or_default()
}

/// Reduced symmetry class of a `theta`-invariant function of `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YClass {
    /// `k = 1`, functions of signed `y`.
    Line,
    /// Functions of `r = |y|`.
    Radial,
    /// Functions `g(r) (y . yhat) / r`, described by the profile `g`.
    Linear,
}

/// A `theta`-invariant basis function in one of the reduced classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum YMode {
    /// `h_j(y)`, `k = 1`.
    Hermite(u32),
    /// `L_m^{(k/2-1)}(r^2/4)`, degree `2m`.
    Radial(u32),
    /// Profile `r L_m^{(k/2)}(r^2/4)`, degree `2m + 1`.
    Linear(u32),
}

impl YMode {
    pub fn degree(&self) -> u32 {
        match *self {
            YMode::Hermite(j) => j,
            YMode::Radial(m) => 2 * m,
            YMode::Linear(m) => 2 * m + 1,
        }
    }

    pub fn class(&self) -> YClass {
        match self {
            YMode::Hermite(_) => YClass::Line,
            YMode::Radial(_) => YClass::Radial,
            YMode::Linear(_) => YClass::Linear,
        }
    }

    /// Value at the reduced coordinate (`y` for lines, `r` otherwise).
    pub fn eval(&self, s: f64, k: usize) -> f64 {
        let half = k as f64 / 2.0;
        match *self {
            YMode::Hermite(j) => hermite_eval(j, s),
            YMode::Radial(m) => laguerre_eval(m, half - 1.0, s * s / 4.0),
            YMode::Linear(m) => s * laguerre_eval(m, half, s * s / 4.0),
        }
    }
}

/// Modes of `class` with degree at most `degree`.
pub fn class_modes(class: YClass, degree: u32) -> Vec<YMode> {
    match class {
        YClass::Line => (0..=degree).map(YMode::Hermite).collect(),
        YClass::Radial => (0..=degree / 2).map(YMode::Radial).collect(),
        YClass::Linear if degree >= 1 => (0..=(degree - 1) / 2).map(YMode::Linear).collect(),
        YClass::Linear => Vec::new(),
    }
}

/// Weighted `L^2(R^k)` inner product of two reduced-class functions.
///
/// The sphere factor is not included.
pub fn y_inner(
    class: YClass,
    k: usize,
    f: impl Fn(f64) -> f64,
    g: impl Fn(f64) -> f64,
    length: f64,
) -> f64 {
    let gl = GaussLegendre::new(20);
    let panels = (4.0 * length).ceil() as usize;
    match class {
        YClass::Line => gl.integrate(
            |y| f(y) * g(y) * (-y * y / 4.0).exp(),
            -length,
            length,
            2 * panels,
        ),
        YClass::Radial | YClass::Linear => {
            let ang = unit_sphere_area(k - 1)
                / if class == YClass::Linear {
                    k as f64
                } else {
                    1.0
                };
            ang * gl.integrate(
                |r| f(r) * g(r) * r.powi(k as i32 - 1) * (-r * r / 4.0).exp(),
                0.0,
                length,
                panels,
            )
        }
    }
}

fn quadrature_length(degree: u32, k: usize) -> f64 {
    10.0 + 3.0 * ((degree as usize + k) as f64).sqrt()
}

/// Weighted squared norm of a basis function over `R^k` (no sphere factor).
///
/// Computed by quadrature on a truncated domain and cached.
pub fn y_norm_sq(mode: YMode, k: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(YMode, usize), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(mode, k)) {
        return *v;
    }
    let len = quadrature_length(mode.degree(), k);
    let v = y_inner(
        mode.class(),
        k,
        |s| mode.eval(s, k),
        |s| mode.eval(s, k),
        len,
    );
    cache.lock().unwrap().insert((mode, k), v);
    v
}

/// Weighted mass of the sphere factor, `|S^{n-k}(rho)| e^{-rho^2/4}`.
pub fn sphere_weight(params: &CylinderParams) -> f64 {
    params.sphere_area(params.rho()) * (-params.rho().powi(2) / 4.0).exp()
}

/// Key of one basis eigenfunction of `-L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    pub sphere_level: u32,
    pub sphere_index: u32,
    pub y: YMode,
}

impl BasisKey {
    pub fn theta_invariant(y: YMode) -> Self {
        Self {
            sphere_level: 0,
            sphere_index: 0,
            y,
        }
    }

    pub fn eigenvalue(&self, params: &CylinderParams) -> f64 {
        sphere_mode_eigenvalue(self.sphere_level, params) + self.y.degree() as f64 / 2.0 - 1.0
    }

    pub fn mode(&self, params: &CylinderParams) -> SpectralMode {
        SpectralMode {
            i: self.sphere_level,
            j: self.y.degree(),
            eigenvalue: self.eigenvalue(params),
        }
    }

    /// Weighted squared norm on the cylinder.
    pub fn norm_sq(&self, params: &CylinderParams) -> f64 {
        sphere_weight(params) * y_norm_sq(self.y, params.k())
    }
}

/// Finite expansion in eigenfunctions of `-L`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenExpansion {
    params: CylinderParams,
    terms: Vec<(BasisKey, f64)>,
    truncation_degree: u32,
}

impl EigenExpansion {
    pub fn new(params: CylinderParams, terms: Vec<(BasisKey, f64)>) -> Result<Self> {
        let k = params.k();
        for (key, _) in &terms {
            let ok = match key.y {
                YMode::Hermite(_) => k == 1,
                _ => true,
            };
            if !ok {
                return domain("Hermite line modes require k = 1");
            }
            if key.sphere_index as usize
                >= sphere_multiplicity(key.sphere_level, params.sphere_dim())
            {
                return domain("spherical harmonic index out of range");
            }
        }
        let mut terms = terms;
        terms.sort_by_key(|a| a.0);
        let mut merged: Vec<(BasisKey, f64)> = Vec::with_capacity(terms.len());
        for (key, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == key => last.1 += c,
                _ => merged.push((key, c)),
            }
        }
        let truncation_degree = merged.iter().map(|(k, _)| k.y.degree()).max().unwrap_or(0);
        Ok(Self {
            params,
            terms: merged,
            truncation_degree,
        })
    }

    /// A single `theta`-invariant mode with coefficient `c`.
    pub fn single(params: CylinderParams, y: YMode, c: f64) -> Result<Self> {
        Self::new(params, vec![(BasisKey::theta_invariant(y), c)])
    }

    pub fn params(&self) -> &CylinderParams {
        &self.params
    }

    pub fn terms(&self) -> &[(BasisKey, f64)] {
        &self.terms
    }

    pub fn truncation_degree(&self) -> u32 {
        self.truncation_degree
    }

    pub fn coefficient(&self, key: &BasisKey) -> f64 {
        self.terms
            .iter()
            .find(|(k, _)| k == key)
            .map(|t| t.1)
            .unwrap_or(0.0)
    }

    /// Squared weighted norm by Plancherel.
    pub fn norm_sq(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c * c * k.norm_sq(&self.params))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Distinct eigenvalues carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(k, _)| k.eigenvalue(&self.params))
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ev
    }

    /// Value of the `theta`-invariant part at the reduced coordinate `s`.
    pub fn eval_reduced(&self, s: f64) -> f64 {
        let k = self.params.k();
        self.terms
            .iter()
            .filter(|(key, _)| key.sphere_level == 0)
            .map(|(key, c)| c * key.y.eval(s, k))
            .sum()
    }

    /// Keep the terms whose eigenvalue satisfies `relation` against `gamma`.
    pub fn filter(&self, gamma: f64, relation: Relation) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| relation.holds(k.eigenvalue(&self.params), gamma))
            .copied()
            .collect();
        Self {
            params: self.params,
            terms,
            truncation_degree: self.truncation_degree,
        }
    }
}

/// Comparison used by spectral projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Relation {
    pub fn holds(self, lambda: f64, gamma: f64) -> bool {
        let tol = 1e-12;
        match self {
            Relation::Eq => (lambda - gamma).abs() <= tol,
            Relation::Le => lambda <= gamma + tol,
            Relation::Ge => lambda >= gamma - tol,
            Relation::Lt => lambda < gamma - tol,
            Relation::Gt => lambda > gamma + tol,
        }
    }
}

/// Outcome of a projection onto eigenspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// All coefficients up to the truncation degree.
    pub full: EigenExpansion,
    /// The requested component.
    pub component: EigenExpansion,
    /// `||v - sum c phi|| / ||v||` on the quadrature domain.
    pub residual: f64,
    /// Set when the residual exceeds [`PROJECTION_RESIDUAL_LIMIT`].
    pub truncation_warning: bool,
}

/// Residual above which a projection is flagged as under-resolved.
pub const PROJECTION_RESIDUAL_LIMIT: f64 = 1e-6;

/// Project a `theta`-invariant function of the reduced coordinate onto the
/// eigenspaces with eigenvalue `~ gamma`.
///
/// `v` is sampled on `[-length, length]` (lines) or `[0, length]`; outside its
/// own domain it should return 0.
pub fn weighted_project(
    params: &CylinderParams,
    class: YClass,
    v: impl Fn(f64) -> f64,
    gamma: f64,
    relation: Relation,
    truncation_degree: u32,
    length: f64,
) -> Result<Projection> {
    if class == YClass::Line && params.k() != 1 {
        return domain("line class requires k = 1");
    }
    let k = params.k();
    let modes = class_modes(class, truncation_degree);
    let terms: Vec<(BasisKey, f64)> = modes
        .iter()
        .map(|m| {
            let c = y_inner(class, k, &v, |s| m.eval(s, k), length) / y_norm_sq(*m, k);
            (BasisKey::theta_invariant(*m), c)
        })
        .collect();
    let vv = y_inner(class, k, &v, &v, length);
    if !(vv > 0.0) {
        return Err(Error::Undefined(
            "projection of a function with zero norm".into(),
        ));
    }
    let full = EigenExpansion::new(*params, terms)?;
    let approx = |s: f64| v(s) - full.eval_reduced(s);
    let res = y_inner(class, k, approx, approx, length).max(0.0).sqrt() / vv.sqrt();
    let component = full.filter(gamma, relation);
    Ok(Projection {
        full,
        component,
        residual: res,
        truncation_warning: res > PROJECTION_RESIDUAL_LIMIT,
    })
}

/// Evolve an expansion under `∂_τ v = L v`: each coefficient is multiplied by `e^{-λτ}`.
pub fn heat_semigroup_evolve(v0: &EigenExpansion, tau: f64) -> EigenExpansion {
    let terms = v0
        .terms
        .iter()
        .map(|(k, c)| (*k, c * (-k.eigenvalue(&v0.params) * tau).exp()))
        .collect();
    EigenExpansion {
        params: v0.params,
        terms,
        truncation_degree: v0.truncation_degree,
    }
}

/// Norms `||v(·, τ)||` sampled from a grid evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSeries {
    pub taus: Vec<f64>,
    pub norms: Vec<f64>,
}

impl NormSeries {
    /// Norm at `tau` by linear interpolation of `log ||v||`.
    pub fn norm_at(&self, tau: f64) -> Result<f64> {
        let n = self.taus.len();
        if n == 0 || tau < self.taus[0] - 1e-9 || tau > self.taus[n - 1] + 1e-9 {
            return Err(Error::Undefined(format!(
                "no norm sample covering tau = {tau}"
            )));
        }
        let idx = self
            .taus
            .partition_point(|&t| t < tau)
            .clamp(1, n.max(2) - 1)
            .min(n - 1);
        if n == 1 {
            return Ok(self.norms[0]);
        }
        let (t0, t1) = (self.taus[idx - 1], self.taus[idx]);
        let (a, b) = (self.norms[idx - 1], self.norms[idx]);
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Undefined("zero norm in series".into()));
        }
        let w = ((tau - t0) / (t1 - t0)).clamp(0.0, 1.0);
        Ok((a.ln() * (1.0 - w) + b.ln() * w).exp())
    }
}

/// A solution of `∂_τ v = L v`.
#[derive(Debug, Clone, PartialEq)]
pub enum JacobiField {
    /// Expansion at `τ = 0`, evolved analytically.
    Spectral(EigenExpansion),
    /// Norms of a grid evolution.
    Sampled(NormSeries),
}

/// Linear decay order `log(||v(τ)|| / ||v(τ+1)||)`.
pub fn linear_decay_order(v: &JacobiField, tau: f64) -> Result<f64> {
    match v {
        JacobiField::Spectral(e) => {
            let p = e.params;
            let parts: Vec<(f64, f64)> = e
                .terms
                .iter()
                .filter(|(_, c)| *c != 0.0)
                .map(|(k, c)| ((c * c * k.norm_sq(&p)).ln(), k.eigenvalue(&p)))
                .collect();
            if parts.is_empty() {
                return Err(Error::Undefined("decay order of the zero field".into()));
            }
            let lse = |t: f64| {
                let xs: Vec<f64> = parts.iter().map(|(la, lam)| la - 2.0 * lam * t).collect();
                let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
            };
            Ok(0.5 * (lse(tau) - lse(tau + 1.0)))
        }
        JacobiField::Sampled(s) => {
            let a = s.norm_at(tau)?;
            let b = s.norm_at(tau + 1.0)?;
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Undefined("zero norm".into()));
            }
            Ok((a / b).ln())
        }
    }
}

/// Finite-volume discretisation of `L` in one reduced class, symmetrised with
/// respect to the Gaussian weight.
#[derive(Debug, Clone)]
pub struct DiscreteJacobi {
    class: YClass,
    h: f64,
    nodes: Vec<f64>,
    /// `log` of the node weights `w(s_i)` (without the cell size).
    log_w: Vec<f64>,
    /// Symmetrised matrix of `-L`.
    matrix: SymTridiagonal,
}

/// Minimum number of cells accepted by [`discretize_jacobi_operator`].
pub const MIN_GRID_POINTS: usize = 16;

/// Cell-centred discretisation of `-L` on `[-length, length]` (lines) or
/// `[0, length]` (radial and linear classes) with `points` cells.
pub fn discretize_jacobi_operator(
    params: &CylinderParams,
    class: YClass,
    points: usize,
    length: f64,
) -> Result<DiscreteJacobi> {
    if points < MIN_GRID_POINTS {
        return Err(Error::GridTooCoarse {
            points,
            minimum: MIN_GRID_POINTS,
        });
    }
    if !(length > 0.0) {
        return domain("domain length must be positive");
    }
    if class == YClass::Line && params.k() != 1 {
        return domain("line class requires k = 1");
    }
    let k = params.k();
    let (start, h) = match class {
        YClass::Line => (-length, 2.0 * length / points as f64),
        _ => (0.0, length / points as f64),
    };
    let log_weight = |s: f64| -> f64 {
        match class {
            YClass::Line => -s * s / 4.0,
            _ => (k as f64 - 1.0) * s.ln() - s * s / 4.0,
        }
    };
    let nodes: Vec<f64> = (0..points).map(|i| start + (i as f64 + 0.5) * h).collect();
    let log_w: Vec<f64> = nodes.iter().map(|&s| log_weight(s)).collect();
    let mut diag = vec![0.0; points];
    let mut off = vec![0.0; points - 1];
    for i in 0..points {
        let mut d = -1.0;
        if i + 1 < points {
            let lf = log_weight(start + (i + 1) as f64 * h);
            d += (lf - log_w[i]).exp() / (h * h);
            off[i] = -(lf - 0.5 * (log_w[i] + log_w[i + 1])).exp() / (h * h);
        }
        if i > 0 {
            let lf = log_weight(start + i as f64 * h);
            d += (lf - log_w[i]).exp() / (h * h);
        }
        if class == YClass::Linear {
            let s = nodes[i];
            d += (k as f64 - 1.0) / (s * s);
            if i == 0 && k == 1 {
                // odd reflection through r = 0 for the one-dimensional linear class
                d += 2.0 * (-log_w[0]).exp() / (h * h);
            }
        }
        diag[i] = d;
    }
    let matrix = SymTridiagonal::new(diag, off)?;
    Ok(DiscreteJacobi {
        class,
        h,
        nodes,
        log_w,
        matrix,
    })
}

impl DiscreteJacobi {
    pub fn class(&self) -> YClass {
        self.class
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Symmetrised matrix of `-L`.
    pub fn matrix(&self) -> &SymTridiagonal {
        &self.matrix
    }

    /// Lowest `m` eigenvalues of `-L`, by Sturm bisection.
    pub fn lowest_eigenvalues(&self, m: usize) -> Vec<f64> {
        self.matrix.lowest_eigenvalues(m)
    }

    /// Eigenfunction (node values) for an eigenvalue of `-L`, unit weighted norm.
    pub fn eigenfunction(&self, lambda: f64) -> Result<Vec<f64>> {
        let z = self.matrix.eigenvector(lambda)?;
        let mut u: Vec<f64> = z
            .iter()
            .zip(&self.log_w)
            .map(|(z, lw)| z * (-0.5 * lw).exp())
            .collect();
        let nrm = self.inner(&u, &u).sqrt();
        u.iter_mut().for_each(|v| *v /= nrm);
        Ok(u)
    }

    /// Discrete weighted inner product `sum w_i f_i g_i h`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.log_w)
            .map(|((a, b), lw)| a * b * lw.exp() * self.h)
            .sum()
    }

    /// Weighted correlation of two node functions.
    pub fn correlation(&self, f: &[f64], g: &[f64]) -> f64 {
        self.inner(f, g) / (self.inner(f, f) * self.inner(g, g)).sqrt()
    }

    /// Apply the (unsymmetrised) discrete `L` to node values.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.nodes.len();
        let sqrt_w: Vec<f64> = self.log_w.iter().map(|lw| (0.5 * lw).exp()).collect();
        let z: Vec<f64> = u.iter().zip(&sqrt_w).map(|(a, s)| a * s).collect();
        let sz = self.matrix.matvec(&z);
        (0..n).map(|i| -sz[i] / sqrt_w[i]).collect()
    }
}

/// Lowest `m` eigenvalues of `-L` over all `theta`-invariant functions, merging
/// the radial and linear classes when `k >= 2`.
pub fn theta_invariant_lowest(
    params: &CylinderParams,
    points: usize,
    length: f64,
    m: usize,
) -> Result<Vec<f64>> {
    if params.k() == 1 {
        return Ok(
            discretize_jacobi_operator(params, YClass::Line, points, length)?.lowest_eigenvalues(m),
        );
    }
    let mut ev =
        discretize_jacobi_operator(params, YClass::Radial, points, length)?.lowest_eigenvalues(m);
    ev.extend(
        discretize_jacobi_operator(params, YClass::Linear, points, length)?.lowest_eigenvalues(m),
    );
    ev.sort_by(|a, b| a.total_cmp(b));
    ev.truncate(m);
    Ok(ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, k: usize) -> CylinderParams {
        CylinderParams::new(n, k).unwrap()
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_eval(3, 2.0), -4.0);
        for y in [-1.3, 0.0, 0.7, 2.5] {
            assert_eq!(hermite_eval(1, y), y);
            assert!((hermite_eval(2, y) - (y * y - 2.0)).abs() < 1e-14);
            assert!((hermite_eval(3, y) - (y * y * y - 6.0 * y)).abs() < 1e-13);
        }
    }

    #[test]
    fn hermite_norms_match_closed_form() {
        // h_j(y) = 2^{j/2} He_j(y / sqrt 2), so ||h_j||^2 = 2 sqrt(pi) 2^j j!
        let mut fact = 1.0;
        for j in 0..10u32 {
            if j > 0 {
                fact *= j as f64;
            }
            let exact = 2.0 * std::f64::consts::PI.sqrt() * 2f64.powi(j as i32) * fact;
            let got = y_norm_sq(YMode::Hermite(j), 1);
            assert!((got - exact).abs() < 1e-10 * exact, "j={j}");
        }
    }

    #[test]
    fn sphere_eigenvalues() {
        let q = p(3, 1);
        assert_eq!(sphere_mode_eigenvalue(0, &q), 0.0);
        assert_eq!(sphere_mode_eigenvalue(1, &q), 0.5);
        assert!((sphere_mode_eigenvalue(2, &q) - 1.5).abs() < 1e-15);
        assert_eq!(sphere_multiplicity(1, 2), 3);
        assert_eq!(sphere_multiplicity(2, 2), 5);
        assert_eq!(sphere_multiplicity(2, 1), 2);
    }

    #[test]
    fn table_rows() {
        for (n, k) in [(2, 1), (3, 1), (3, 2), (5, 2), (7, 3)] {
            let q = p(n, k);
            let s = enumerate_spectrum(&q, -0.9, SymmetryClass::Full).unwrap();
            assert_eq!(s.len(), 1);
            assert_eq!((s[0].eigenvalue, s[0].multiplicity), (-1.0, 1));
            let s = enumerate_spectrum(&q, -0.4, SymmetryClass::Full).unwrap();
            assert_eq!(s.len(), 2);
            assert_eq!(s[1].multiplicity, (n - k + 1) + k);
            let s = enumerate_spectrum(&q, 0.0, SymmetryClass::Full).unwrap();
            assert_eq!(s.len(), 3);
            assert_eq!(s[2].multiplicity, (n - k + 1) * k + k * (k + 1) / 2);
        }
    }

    #[test]
    fn basis_is_orthogonal() {
        for (class, k) in [
            (YClass::Line, 1),
            (YClass::Radial, 1),
            (YClass::Radial, 3),
            (YClass::Linear, 2),
            (YClass::Linear, 1),
        ] {
            let modes = class_modes(class, 8);
            for a in &modes {
                for b in &modes {
                    if a == b {
                        continue;
                    }
                    let ip = y_inner(class, k, |s| a.eval(s, k), |s| b.eval(s, k), 20.0);
                    let scale = (y_norm_sq(*a, k) * y_norm_sq(*b, k)).sqrt();
                    assert!(
                        ip.abs() < 1e-10 * scale,
                        "{class:?} k={k} {a:?} {b:?}: {ip}"
                    );
                }
            }
        }
    }

    #[test]
    fn projection_examples() {
        let q = p(2, 1);
        let pr = weighted_project(
            &q,
            YClass::Line,
            |y| y * y - 2.0,
            0.0,
            Relation::Eq,
            6,
            20.0,
        )
        .unwrap();
        assert!(
            (pr.component
                .coefficient(&BasisKey::theta_invariant(YMode::Hermite(2)))
                - 1.0)
                .abs()
                < 1e-12
        );
        assert!(!pr.truncation_warning);
        let pr =
            weighted_project(&q, YClass::Line, |y| 3.0 + y, -1.0, Relation::Eq, 6, 20.0).unwrap();
        assert_eq!(pr.component.terms().len(), 1);
        assert!((pr.component.terms()[0].1 - 3.0).abs() < 1e-12);
        let pr = weighted_project(&q, YClass::Line, |y| y, 0.0, Relation::Eq, 6, 20.0).unwrap();
        assert!(pr.component.norm() < 1e-12);
        let pr = weighted_project(&q, YClass::Line, |y| y, -1.5, Relation::Le, 6, 20.0).unwrap();
        assert!(pr.component.terms().is_empty());
        let pr = weighted_project(
            &q,
            YClass::Line,
            |y| (y / 3.0).sin() * 8.0,
            0.0,
            Relation::Le,
            2,
            20.0,
        )
        .unwrap();
        assert!(pr.truncation_warning);
    }

    #[test]
    fn semigroup_examples() {
        let q = p(2, 1);
        let h2 = EigenExpansion::single(q, YMode::Hermite(2), 1.0).unwrap();
        assert_eq!(heat_semigroup_evolve(&h2, 3.7), h2);
        let one = EigenExpansion::single(q, YMode::Hermite(0), 1.0).unwrap();
        let e = heat_semigroup_evolve(&one, 1.0);
        assert!((e.terms()[0].1 - std::f64::consts::E).abs() < 1e-15);
        let y = EigenExpansion::single(q, YMode::Hermite(1), 1.0).unwrap();
        let e = heat_semigroup_evolve(&y, 2.0);
        assert!((e.terms()[0].1 - 1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn decay_order_of_pure_mode_and_mixture() {
        let q = p(3, 1);
        let v = EigenExpansion::single(q, YMode::Hermite(3), 2.0).unwrap();
        let n = linear_decay_order(&JacobiField::Spectral(v), 0.3).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
        let mix = EigenExpansion::new(
            q,
            vec![
                (BasisKey::theta_invariant(YMode::Hermite(0)), 0.1),
                (BasisKey::theta_invariant(YMode::Hermite(2)), 1.0),
            ],
        )
        .unwrap();
        let f = JacobiField::Spectral(mix);
        let mut prev = f64::INFINITY;
        for i in 0..30 {
            let n = linear_decay_order(&f, 0.2 * i as f64).unwrap();
            assert!(n < prev && n > -1.0 && n < 0.0);
            prev = n;
        }
        let zero = EigenExpansion::new(q, vec![]).unwrap();
        assert!(linear_decay_order(&JacobiField::Spectral(zero), 0.0).is_err());
    }

    #[test]
    fn discrete_operator_basics() {
        let q = p(2, 1);
        assert!(matches!(
            discretize_jacobi_operator(&q, YClass::Line, 8, 10.0),
            Err(Error::GridTooCoarse { .. })
        ));
        let op = discretize_jacobi_operator(&q, YClass::Line, 400, 12.0).unwrap();
        let ev = op.lowest_eigenvalues(3);
        assert!((ev[0] + 1.0).abs() < 1e-10);
        assert!((ev[1] + 0.5).abs() < 1e-3);
        assert!(ev[2].abs() < 1e-3);
        let u = op.eigenfunction(ev[1]).unwrap();
        let y: Vec<f64> = op.nodes().to_vec();
        assert!(op.correlation(&u, &y).abs() > 0.999);
        let h2: Vec<f64> = y.iter().map(|s| s * s - 2.0).collect();
        let lh2 = op.apply(&h2);
        for (s, v) in y.iter().zip(&lh2) {
            if s.abs() < 6.0 {
                assert!(
                    v.abs() < 0.2 * op.spacing().powi(2) * (1.0 + s.powi(4)),
                    "{s}: {v}"
                );
            }
        }
    }
}
