//! Decay orders and the non-concentration inequality.

use super::distance::{concentration_integral, l2_distance};
use crate::error::{Error, Result};
use crate::flow::FlowTrace;

/// Samples `(tau, d(tau))`, optionally restricted to the box of radius `radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub samples: Vec<(f64, f64)>,
    pub radius: Option<f64>,
}

impl DecaySeries {
    pub fn new(samples: Vec<(f64, f64)>, radius: Option<f64>) -> Self {
        Self { samples, radius }
    }

    /// Distances of the profiles stored in a rescaled trace.
    pub fn from_trace(trace: &FlowTrace, radius: Option<f64>) -> Result<Self> {
        let samples = trace
            .profiles
            .iter()
            .map(|p| Ok((p.time().value(), l2_distance(p, radius)?.value)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { samples, radius })
    }

    /// `d` at `tau`, interpolating `log d` between samples.
    pub fn distance_at(&self, tau: f64) -> Result<f64> {
        let s = &self.samples;
        let tol = 1e-9;
        let idx = s.partition_point(|p| p.0 < tau - tol);
        if idx < s.len() && (s[idx].0 - tau).abs() <= tol {
            return positive(s[idx].1, tau);
        }
        if idx == 0 || idx >= s.len() {
            return Err(Error::Undefined(format!(
                "no distance sample covering tau = {tau}"
            )));
        }
        let (a, b) = (s[idx - 1], s[idx]);
        let (da, db) = (positive(a.1, a.0)?, positive(b.1, b.0)?);
        let w = (tau - a.0) / (b.0 - a.0);
        Ok((da.ln() * (1.0 - w) + db.ln() * w).exp())
    }

    /// `(tau, N(tau))` at every sample with `tau + 1` inside the series.
    pub fn orders(&self) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .filter_map(|(t, _)| decay_order(self, *t).ok().map(|n| (*t, n)))
            .collect()
    }
}

fn positive(d: f64, tau: f64) -> Result<f64> {
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::Undefined(format!(
            "distance vanishes at tau = {tau}"
        )))
    }
}

/// `N(tau) = log(d(tau) / d(tau + 1))`.
pub fn decay_order(series: &DecaySeries, tau: f64) -> Result<f64> {
    Ok((series.distance_at(tau)? / series.distance_at(tau + 1.0)?).ln())
}

/// Fit of `|N_R - N|` against `R` at one `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedFit {
    pub tau: f64,
    /// `(R, |N_R(tau) - N(tau)|)`.
    pub gaps: Vec<(f64, f64)>,
    /// Log-log slope of the gaps against `R`.
    pub exponent: f64,
    /// Smallest `R0` with `|N_R - N| <= R0 / (tau R^2)` at every sampled `R`.
    pub r0: f64,
}

/// Compare restricted decay orders with the full one.
pub fn restricted_decay_fit(
    full: &DecaySeries,
    restricted: &[DecaySeries],
    tau: f64,
) -> Result<RestrictedFit> {
    let n = decay_order(full, tau)?;
    let mut gaps = Vec::new();
    for s in restricted {
        let r = s
            .radius
            .ok_or_else(|| Error::Undefined("restricted series without a radius".into()))?;
        gaps.push((r, (decay_order(s, tau)? - n).abs()));
    }
    let pts: Vec<(f64, f64)> = gaps
        .iter()
        .filter(|g| g.1 > 0.0)
        .map(|(r, g)| (r.ln(), g.ln()))
        .collect();
    let exponent = slope(&pts).unwrap_or(f64::NAN);
    let r0 = gaps
        .iter()
        .map(|(r, g)| g * tau * r * r)
        .fold(0.0, f64::max);
    Ok(RestrictedFit {
        tau,
        gaps,
        exponent,
        r0,
    })
}

pub(crate) fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Weighted integral against `d(0)^2` along a run, with a fitted exponential bound.
#[derive(Debug, Clone, PartialEq)]
pub struct NonconcentrationReport {
    /// Rescaled time measured from the start of the run.
    pub taus: Vec<f64>,
    pub lhs: Vec<f64>,
    /// `lhs / d(0)^2`.
    pub ratio: Vec<f64>,
    /// `ratio <= c e^{k tau}` holds at every sample.
    pub c: f64,
    pub k: f64,
}

/// Evaluate `∫ odist^2 (1 + tau |X|^2) e^{-|X|^2/4}` over the stored profiles.
///
/// `k` comes from a least-squares fit of `log ratio` against `tau`; `c` is then
/// the smallest constant making the bound hold at every sample.
pub fn nonconcentration_check(trace: &FlowTrace) -> Result<NonconcentrationReport> {
    let first = trace
        .profiles
        .first()
        .ok_or_else(|| Error::Undefined("trace stores no profiles".into()))?;
    let d0 = l2_distance(first, None)?.value;
    if !(d0 > 0.0) {
        return Err(Error::Undefined("initial distance vanishes".into()));
    }
    let t0 = first.time().value();
    let mut taus = Vec::new();
    let mut lhs = Vec::new();
    for p in &trace.profiles {
        let tau = p.time().value() - t0;
        taus.push(tau);
        lhs.push(concentration_integral(p, tau));
    }
    let ratio: Vec<f64> = lhs.iter().map(|l| l / (d0 * d0)).collect();
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(&ratio)
        .filter(|(_, r)| **r > 0.0)
        .map(|(t, r)| (*t, r.ln()))
        .collect();
    let k = slope(&pts).unwrap_or(0.0);
    let c = taus
        .iter()
        .zip(&ratio)
        .map(|(t, r)| r * (-k * t).exp())
        .fold(0.0, f64::max);
    Ok(NonconcentrationReport {
        taus,
        lhs,
        ratio,
        c,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_has_constant_order() {
        let g = 0.7;
        let s = DecaySeries::new(
            (0..=40)
                .map(|i| (i as f64 * 0.25, 3.0 * (-g * i as f64 * 0.25).exp()))
                .collect(),
            None,
        );
        for (_, n) in s.orders() {
            assert!((n - g).abs() < 1e-12);
        }
        assert!((decay_order(&s, 2.1).unwrap() - g).abs() < 1e-12);
        let flat = DecaySeries::new(vec![(0.0, 1.0), (1.0, 1.0)], None);
        assert_eq!(decay_order(&flat, 0.0).unwrap(), 0.0);
        assert!(decay_order(&flat, 0.5).is_err());
        let zero = DecaySeries::new(vec![(0.0, 0.0), (1.0, 1.0)], None);
        assert!(matches!(decay_order(&zero, 0.0), Err(Error::Undefined(_))));
    }
}
