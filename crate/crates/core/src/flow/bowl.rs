//! The rotationally symmetric translator ("bowl") in `R^{m+1}`.
//!
//! Its height `U(s)` over `s = |x|` solves `U''/(1 + U'^2) + (m - 1) U'/s = 1`,
//! integrated as `p = U'`, `p' = (1 + p^2)(1 - (m - 1) p / s)` from a series
//! start at the origin.

use crate::error::{domain, Error, Result};

/// `U` and its first two derivatives on a uniform grid in `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BowlProfile {
    pub m: usize,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub d2u: Vec<f64>,
}

fn slope_rate(m: f64, s: f64, p: f64) -> f64 {
    (1.0 + p * p) * (1.0 - (m - 1.0) * p / s)
}

/// Series `U ≈ s^2/(2m) + s^4/(4 m^3 (m + 2))` near the origin.
pub fn bowl_series(m: usize, s: f64) -> (f64, f64) {
    let m = m as f64;
    let b = 1.0 / (m * m * m * (m + 2.0));
    (
        s * s / (2.0 * m) + b * s.powi(4) / 4.0,
        s / m + b * s.powi(3),
    )
}

fn rhs(m: f64, s: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], slope_rate(m, s, y[1])]
}

// Dormand-Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step(m: f64, s: f64, y: [f64; 2], h: f64) -> ([f64; 2], f64) {
    let mut k = [[0.0; 2]; 7];
    for i in 0..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            yi[0] += h * A[i][j] * kj[0];
            yi[1] += h * A[i][j] * kj[1];
        }
        k[i] = rhs(m, s + C[i] * h, yi);
    }
    let mut y5 = y;
    let mut err = 0.0f64;
    for c in 0..2 {
        let mut d = 0.0;
        for i in 0..7 {
            y5[c] += h * B5[i] * k[i][c];
            d += h * (B5[i] - B4[i]) * k[i][c];
        }
        err = err.max(d.abs() / (1.0 + y5[c].abs()));
    }
    (y5, err)
}

/// Integrate from `from` to `to` with adaptive Dormand-Prince steps.
fn integrate(
    m: f64,
    from: f64,
    to: f64,
    mut y: [f64; 2],
    tol: f64,
    h: &mut f64,
) -> Result<[f64; 2]> {
    let mut s = from;
    let mut guard = 0usize;
    while s < to {
        guard += 1;
        if guard > 10_000_000 {
            return Err(Error::NoConvergence(
                "bowl integration exceeded the step budget".into(),
            ));
        }
        let step = h.min(to - s);
        let (next, err) = dp_step(m, s, y, step);
        if err <= tol || step < 1e-14 {
            s += step;
            y = next;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
        };
        *h = step * factor;
    }
    Ok(y)
}

/// Solve on `[0, s_max]` with `points` uniform samples.
pub fn bowl_translator_solve(m: usize, s_max: f64, points: usize) -> Result<BowlProfile> {
    if m < 2 {
        return domain("the bowl needs m >= 2");
    }
    if !(s_max > 0.0) || points < 2 {
        return domain("need s_max > 0 and at least 2 samples");
    }
    let mf = m as f64;
    let ds = s_max / (points - 1) as f64;
    let start = (1e-3f64).min(0.5 * ds);
    let (u0, p0) = bowl_series(m, start);
    let mut y = [u0, p0];
    let mut s_prev = start;
    let mut h = 1e-4;
    let mut out = BowlProfile {
        m,
        s: vec![0.0],
        u: vec![0.0],
        du: vec![0.0],
        d2u: vec![1.0 / mf],
    };
    for i in 1..points {
        let s = i as f64 * ds;
        y = integrate(mf, s_prev, s, y, 1e-13, &mut h)?;
        s_prev = s;
        out.s.push(s);
        out.u.push(y[0]);
        out.du.push(y[1]);
        out.d2u.push(slope_rate(mf, s, y[1]));
    }
    Ok(out)
}

impl BowlProfile {
    /// `U(s) - (s^2/(2(m-1)) - log s)` at every positive sample.
    pub fn asymptotic_gap(&self) -> Vec<(f64, f64)> {
        let m = self.m as f64;
        self.s
            .iter()
            .zip(&self.u)
            .filter(|(s, _)| **s > 0.0)
            .map(|(s, u)| (*s, u - (s * s / (2.0 * (m - 1.0)) - s.ln())))
            .collect()
    }

    /// Linear interpolation of the asymptotic gap.
    pub fn gap_at(&self, s: f64) -> Option<f64> {
        let ds = self.s[1] - self.s[0];
        let t = s / ds;
        let i = t.floor() as usize;
        if i + 1 >= self.s.len() || s <= 0.0 {
            return None;
        }
        let m = self.m as f64;
        let g = |j: usize| self.u[j] - (self.s[j] * self.s[j] / (2.0 * (m - 1.0)) - self.s[j].ln());
        let w = t - i as f64;
        Some(g(i) * (1.0 - w) + g(i + 1) * w)
    }

    pub fn is_convex(&self) -> bool {
        self.d2u.iter().all(|d| *d > 0.0)
    }
}

/// Log-log slope of `|E(2s) - E(s)|` against `s` over the given `s` values,
/// where `E` is the asymptotic gap. `None` if a doubled point leaves the grid.
pub fn tail_exponent(profile: &BowlProfile, s_values: &[f64]) -> Option<f64> {
    let mut pts = Vec::with_capacity(s_values.len());
    for &s in s_values {
        let d = (profile.gap_at(2.0 * s)? - profile.gap_at(s)?).abs();
        if d == 0.0 {
            return None;
        }
        pts.push((s.ln(), d.ln()));
    }
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_series_near_origin() {
        for m in [2, 3, 6] {
            let b = bowl_translator_solve(m, 0.4, 41).unwrap();
            for (s, u) in b.s.iter().zip(&b.u).skip(1) {
                let quad = s * s / (2.0 * m as f64);
                let (series, _) = bowl_series(m, *s);
                assert!((u - quad).abs() < 0.1 * s.powi(4));
                assert!((u - series).abs() < s.powi(6));
            }
            assert!(b.is_convex());
        }
    }

    #[test]
    fn gap_settles() {
        let b = bowl_translator_solve(3, 64.0, 6401).unwrap();
        let d1 = (b.gap_at(16.0).unwrap() - b.gap_at(8.0).unwrap()).abs();
        let d2 = (b.gap_at(32.0).unwrap() - b.gap_at(16.0).unwrap()).abs();
        assert!(d2 < d1);
        assert!(tail_exponent(&b, &[4.0, 8.0, 16.0]).unwrap() < 0.0);
    }

    #[test]
    fn tail_matches_inverse_square_coefficient() {
        // substituting U = s^2/(2(m-1)) - log s + E + c/s^2 into the ODE fixes
        // c = (m-1)(4-m)/2, so E(2s) - E(s) -> -3c/(4s^2)
        for m in [2usize, 3, 6] {
            let b = bowl_translator_solve(m, 70.0, 7001).unwrap();
            let c = (m as f64 - 1.0) * (4.0 - m as f64) / 2.0;
            let s = 32.0;
            let diff = b.gap_at(2.0 * s).unwrap() - b.gap_at(s).unwrap();
            let want = -3.0 * c / (4.0 * s * s);
            assert!((diff / want - 1.0).abs() < 0.02, "m {m}: {diff} vs {want}");
        }
    }
}
