//! Unit-step verdicts on the decay order of a rescaled run.

use super::decay::{decay_order, DecaySeries};
use crate::error::{domain, Result};
use crate::flow::FlowTrace;

/// Thresholds of the sweep. All are inputs; none is fixed by the analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Locking tolerance and the slack on the floor `N >= -1 - eps`.
    pub epsilon: f64,
    /// Required drop `N(tau) - N(tau + 1)`.
    pub delta2: f64,
    /// Largest `d` for which the run counts as close to the cylinder.
    pub closeness: f64,
    /// Candidate locking values, usually the spectrum of the cylinder.
    pub spectrum: Vec<f64>,
}

impl SweepConfig {
    pub fn new(epsilon: f64, closeness: f64, spectrum: Vec<f64>) -> Result<Self> {
        if !(epsilon > 0.0) || !(closeness > 0.0) {
            return domain("epsilon and closeness must be positive");
        }
        Ok(Self {
            epsilon,
            delta2: 0.0,
            closeness,
            spectrum,
        })
    }

    pub fn with_delta2(mut self, delta2: f64) -> Self {
        self.delta2 = delta2;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// `N` dropped by the measured amount.
    Drop(f64),
    /// `N` stayed within `epsilon` of this eigenvalue over the step.
    SpectrumLocked(f64),
    Violation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepVerdict {
    pub tau: f64,
    pub order: f64,
    pub next_order: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub steps: Vec<StepVerdict>,
    /// First sample time at which `d` exceeded the closeness bound.
    pub truncated_at: Option<f64>,
    pub notice: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub drops: usize,
    pub locked: usize,
    pub violations: usize,
    /// Fraction of steps that are not violations.
    pub fraction_ok: f64,
}

impl SweepReport {
    pub fn summary(&self) -> SweepSummary {
        let count = |f: fn(&Verdict) -> bool| self.steps.iter().filter(|s| f(&s.verdict)).count();
        let drops = count(|v| matches!(v, Verdict::Drop(_)));
        let locked = count(|v| matches!(v, Verdict::SpectrumLocked(_)));
        let violations = count(|v| matches!(v, Verdict::Violation));
        let total = self.steps.len();
        let fraction_ok = if total == 0 {
            1.0
        } else {
            (total - violations) as f64 / total as f64
        };
        SweepSummary {
            drops,
            locked,
            violations,
            fraction_ok,
        }
    }
}

/// Classify every unit step `[tau, tau + 1]` of a series of distances.
///
/// The window ends at the first sample with `d > closeness`. Steps start at
/// the first sample and advance by one; the orders inside a step are taken at
/// every sample in `[tau, tau + 1]`.
pub fn classify_series(series: &DecaySeries, cfg: &SweepConfig) -> Result<SweepReport> {
    let s = &series.samples;
    let Some(&(start, _)) = s.first() else {
        return domain("empty decay series");
    };
    let cut = s.iter().position(|p| p.1 > cfg.closeness);
    let truncated_at = cut.map(|i| s[i].0);
    let notice = truncated_at.map(|t| {
        format!(
            "distance exceeds {} at tau = {t}; window truncated",
            cfg.closeness
        )
    });
    let window = DecaySeries::new(s[..cut.unwrap_or(s.len())].to_vec(), series.radius);
    let end = window.samples.last().map(|p| p.0).unwrap_or(start);
    let mut steps = Vec::new();
    let mut tau = start;
    while tau + 2.0 <= end + 1e-9 {
        let n0 = decay_order(&window, tau)?;
        let n1 = decay_order(&window, tau + 1.0)?;
        let mut inside = vec![n0, n1];
        for (t, _) in &window.samples {
            if *t > tau && *t < tau + 1.0 {
                inside.push(decay_order(&window, *t)?);
            }
        }
        let locked = cfg
            .spectrum
            .iter()
            .map(|g| (*g, inside.iter().map(|n| (n - g).abs()).fold(0.0, f64::max)))
            .filter(|(_, dev)| *dev <= cfg.epsilon)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        let verdict = if let Some((g, _)) = locked {
            Verdict::SpectrumLocked(g)
        } else if n1 <= n0 - cfg.delta2 && n1 >= -1.0 - cfg.epsilon {
            Verdict::Drop(n0 - n1)
        } else {
            Verdict::Violation
        };
        steps.push(StepVerdict {
            tau,
            order: n0,
            next_order: n1,
            verdict,
        });
        tau += 1.0;
    }
    Ok(SweepReport {
        steps,
        truncated_at,
        notice,
    })
}

/// [`classify_series`] on the full distance of a rescaled run with stored profiles.
pub fn monotonicity_sweep(trace: &FlowTrace, cfg: &SweepConfig) -> Result<SweepReport> {
    if !trace.rescaled {
        return domain("monotonicity sweep needs a rescaled run");
    }
    classify_series(&DecaySeries::from_trace(trace, None)?, cfg)
}

/// Steps where `N(tau) <= gamma` but `N(tau + 1) > gamma + tol`.
pub fn threshold_failures(report: &SweepReport, gamma: f64, tol: f64) -> usize {
    report
        .steps
        .iter()
        .filter(|s| s.order <= gamma && s.next_order > gamma + tol)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, end: f64) -> DecaySeries {
        DecaySeries::new(
            (0..=(end * 10.0) as usize)
                .map(|i| (i as f64 * 0.1, f(i as f64 * 0.1)))
                .collect(),
            None,
        )
    }

    #[test]
    fn pure_mode_locks() {
        let cfg = SweepConfig::new(0.05, 1.0, vec![-1.0, -0.5, 0.0, 0.5]).unwrap();
        let r = classify_series(&series(|t| 1e-3 * (-0.5 * t).exp(), 8.0), &cfg).unwrap();
        assert_eq!(r.steps.len(), 7);
        assert!(r
            .steps
            .iter()
            .all(|s| s.verdict == Verdict::SpectrumLocked(0.5)));
        assert!(r.truncated_at.is_none());
    }

    #[test]
    fn mixture_drops_then_locks() {
        // d^2 = a^2 e^{-2 l1 t} + b^2 e^{-2 l2 t}: N decreases from between the
        // eigenvalues towards the smaller one
        let d = |t: f64| (1e-6 * (-2.0 * 0.5 * t).exp() + 1e-6 * (-2.0 * 2.0 * t).exp()).sqrt();
        let cfg = SweepConfig::new(0.05, 1.0, vec![0.5, 2.0]).unwrap();
        let r = classify_series(&series(d, 10.0), &cfg).unwrap();
        let sum = r.summary();
        assert_eq!(sum.violations, 0);
        assert!(matches!(r.steps[0].verdict, Verdict::Drop(_)));
        assert_eq!(
            r.steps.last().unwrap().verdict,
            Verdict::SpectrumLocked(0.5)
        );
        assert_eq!(threshold_failures(&r, 1.0, 1e-12), 0);
    }

    #[test]
    fn growth_past_closeness_truncates() {
        let cfg = SweepConfig::new(0.05, 0.1, vec![-1.0]).unwrap();
        let r = classify_series(&series(|t| 1e-3 * t.exp(), 8.0), &cfg).unwrap();
        assert!(r.notice.is_some());
        assert!((r.truncated_at.unwrap() - 4.7).abs() < 1e-9);
        assert!(r
            .steps
            .iter()
            .all(|s| s.verdict == Verdict::SpectrumLocked(-1.0)));
        let rising = classify_series(
            &series(|t| 1e-3 * (1.0 + t * t), 6.0),
            &SweepConfig::new(0.05, 1.0, vec![]).unwrap(),
        )
        .unwrap();
        assert!(rising.steps.iter().any(|s| s.verdict == Verdict::Violation));
    }
}
