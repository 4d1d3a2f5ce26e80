//! Tridiagonal linear algebra.
//!
//! Provides the Thomas solver used by every implicit time step, and a small
//! symmetric tridiagonal eigen toolkit: implicit-shift QL for full spectra,
//! Sturm-sequence bisection for the lowest eigenvalues and inverse iteration
//! for individual eigenvectors.

use crate::error::{Error, Result};

/// Solve `a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i]`.
///
/// `a[0]` and `c[n-1]` are ignored. Fails on a vanishing pivot.
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.len() != n || c.len() != n || d.len() != n {
        return Err(Error::Domain(
            "tridiagonal bands must have equal length".into(),
        ));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    let mut piv = b[0];
    if piv == 0.0 || !piv.is_finite() {
        return Err(Error::Undefined("zero pivot in tridiagonal solve".into()));
    }
    cp[0] = c[0] / piv;
    dp[0] = d[0] / piv;
    for i in 1..n {
        piv = b[i] - a[i] * cp[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::Undefined("zero pivot in tridiagonal solve".into()));
        }
        cp[i] = c[i] / piv;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / piv;
    }
    let mut x = dp;
    for i in (0..n - 1).rev() {
        x[i] -= cp[i] * x[i + 1];
    }
    Ok(x)
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off[i]` couples rows `i` and `i+1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let e2 = if i > 0 {
                self.off[i - 1] * self.off[i - 1]
            } else {
                0.0
            };
            q = self.diag[i] - x - if i > 0 { e2 / q } else { 0.0 };
            if q == 0.0 {
                q = f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `m` smallest eigenvalues by bisection, ascending.
    pub fn lowest_eigenvalues(&self, m: usize) -> Vec<f64> {
        let m = m.min(self.dim());
        let (lo0, hi0) = self.gershgorin();
        let scale = lo0.abs().max(hi0.abs()).max(1.0);
        let mut out = Vec::with_capacity(m);
        for idx in 0..m {
            let (mut lo, mut hi) = (lo0, hi0);
            // invariant: count_below(lo) <= idx < count_below(hi)
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= 4.0 * f64::EPSILON * scale {
                    break;
                }
                if self.count_below(mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }

    /// Unit eigenvector for an eigenvalue estimate `lambda` by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let (lo, hi) = self.gershgorin();
        let shift = lambda + 1e-10 * (hi - lo).abs().max(1.0);
        let a: Vec<f64> = (0..n)
            .map(|i| if i > 0 { self.off[i - 1] } else { 0.0 })
            .collect();
        let c: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { self.off[i] } else { 0.0 })
            .collect();
        let b: Vec<f64> = self.diag.iter().map(|d| d - shift).collect();
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.01 * ((i * 7919) % 13) as f64)
            .collect();
        normalize(&mut x);
        for _ in 0..8 {
            let mut y = solve_tridiagonal(&a, &b, &c, &x)?;
            normalize(&mut y);
            let diff: f64 = x
                .iter()
                .zip(&y)
                .map(|(p, q)| (p - q).abs().min((p + q).abs()))
                .fold(0.0, f64::max);
            x = y;
            if diff < 1e-13 {
                break;
            }
        }
        Ok(x)
    }

    /// All eigenvalues, ascending, by implicit-shift QL.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (mut d, _) = self.ql(false)?;
        d.sort_by(|a, b| a.total_cmp(b));
        Ok(d)
    }

    /// Full eigen-decomposition by implicit-shift QL with accumulated rotations.
    pub fn eigen(&self) -> Result<EigenDecomposition> {
        let (d, z) = self.ql(true)?;
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        let values = order.iter().map(|&i| d[i]).collect();
        let vectors = order
            .iter()
            .map(|&col| (0..n).map(|row| z[row * n + col]).collect())
            .collect();
        Ok(EigenDecomposition { values, vectors })
    }

    fn ql(&self, vectors: bool) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        let mut z = if vectors {
            let mut z = vec![0.0; n * n];
            for i in 0..n {
                z[i * n + i] = 1.0;
            }
            z
        } else {
            Vec::new()
        };
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence("QL iteration".into()));
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut underflow = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if vectors {
                        for k in 0..n {
                            let f = z[k * n + i + 1];
                            z[k * n + i + 1] = s * z[k * n + i] + c * f;
                            z[k * n + i] = c * z[k * n + i] - s * f;
                        }
                    }
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        Ok((d, z))
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    fn exact_laplacian(n: usize, j: usize) -> f64 {
        let t = std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64;
        2.0 - 2.0 * t.cos()
    }

    #[test]
    fn thomas_solves_random_system() {
        let n = 50;
        let a: Vec<f64> = (0..n).map(|i| -0.3 - 0.01 * i as f64).collect();
        let b: Vec<f64> = (0..n).map(|i| 3.0 + 0.1 * (i % 5) as f64).collect();
        let c: Vec<f64> = (0..n).map(|i| -0.7 + 0.02 * (i % 3) as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let d: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = b[i] * x[i];
                if i > 0 {
                    s += a[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += c[i] * x[i + 1];
                }
                s
            })
            .collect();
        let sol = solve_tridiagonal(&a, &b, &c, &d).unwrap();
        for (p, q) in sol.iter().zip(&x) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn ql_matches_closed_form() {
        let n = 40;
        let ev = laplacian(n).eigenvalues().unwrap();
        for (j, v) in ev.iter().enumerate() {
            assert!((v - exact_laplacian(n, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn bisection_matches_ql() {
        let diag: Vec<f64> = (0..30).map(|i| (i as f64).powi(2) * 0.1 - 1.0).collect();
        let off: Vec<f64> = (0..29).map(|i| 0.5 + 0.1 * (i % 4) as f64).collect();
        let m = SymTridiagonal::new(diag, off).unwrap();
        let all = m.eigenvalues().unwrap();
        let low = m.lowest_eigenvalues(6);
        for (p, q) in low.iter().zip(&all) {
            assert!((p - q).abs() < 1e-11, "{p} vs {q}");
        }
    }

    #[test]
    fn eigenvectors_satisfy_equation() {
        let m = laplacian(25);
        let dec = m.eigen().unwrap();
        for (lam, v) in dec.values.iter().zip(&dec.vectors) {
            let mv = m.matvec(v);
            for (p, q) in mv.iter().zip(v) {
                assert!((p - lam * q).abs() < 1e-12);
            }
        }
        let lam0 = m.lowest_eigenvalues(1)[0];
        let v = m.eigenvector(lam0).unwrap();
        let dot: f64 = v.iter().zip(&dec.vectors[0]).map(|(a, b)| a * b).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-10);
    }
}
