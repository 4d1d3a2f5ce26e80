//! Driving steppers over a horizon, recording traces, and locating pinches.

use super::profile::RadialProfile;
use super::steppers::{mcf_step_dt, rmcf_step, StepperConfig};
use crate::error::{domain, Error, Result};

/// Per-sample diagnostics of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub time: f64,
    pub min_v: f64,
    pub argmin: f64,
    /// Smallest mean curvature over the grid.
    pub h_min: f64,
    pub mean_convex: bool,
    /// Weighted distance to the cylinder, filled in by diagnostics.
    pub distance: Option<f64>,
    /// Noncollapsing constant estimate, filled in by diagnostics.
    pub alpha: Option<f64>,
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Horizon,
    /// Minimum radius fell below the configured threshold.
    PinchThreshold,
    MaxSteps,
    /// The stepper refused to continue; the message is kept.
    Stopped(String),
}

/// Time-ordered samples of a run.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub rescaled: bool,
    pub records: Vec<TraceRecord>,
    pub profiles: Vec<RadialProfile>,
    /// Time and minimum radius after every step.
    pub minima: Vec<(f64, f64)>,
    pub termination: Termination,
}

impl FlowTrace {
    pub fn last_profile(&self) -> Option<&RadialProfile> {
        self.profiles.last()
    }

    /// Profile sampled closest to `time`.
    pub fn profile_near(&self, time: f64) -> Option<&RadialProfile> {
        self.profiles.iter().min_by(|a, b| {
            (a.time().value() - time)
                .abs()
                .total_cmp(&(b.time().value() - time).abs())
        })
    }
}

/// Sampling and stopping settings for [`run_flow`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Final time (tau or t).
    pub horizon: f64,
    /// Spacing of recorded samples; `0` records every step.
    pub sample_every: f64,
    /// Keep the profile at each sample.
    pub keep_profiles: bool,
}

fn record(p: &RadialProfile) -> TraceRecord {
    let (i, v) = p.min();
    let h = p.mean_curvature();
    let h_min = h.iter().copied().fold(f64::INFINITY, f64::min);
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

/// Evolve `initial` until the horizon, the pinch threshold, or a stepper refusal.
///
/// Rescaled profiles use [`rmcf_step`], flow-time profiles the unrescaled step.
/// With `cfg.adaptive = Some(c)` the step is `min(dt, c min(v)^2)`.
pub fn run_flow(
    initial: &RadialProfile,
    cfg: &StepperConfig,
    opts: &RunOptions,
) -> Result<FlowTrace> {
    cfg.validate()?;
    if !(opts.horizon > initial.time().value()) {
        return domain("horizon must lie after the initial time");
    }
    let rescaled = initial.time().is_rescaled();
    let mut p = initial.clone();
    let mut trace = FlowTrace {
        rescaled,
        records: vec![record(&p)],
        profiles: if opts.keep_profiles {
            vec![p.clone()]
        } else {
            Vec::new()
        },
        minima: vec![(p.time().value(), p.min().1)],
        termination: Termination::MaxSteps,
    };
    let mut next_sample = p.time().value() + opts.sample_every;
    for _ in 0..cfg.max_steps {
        let t = p.time().value();
        if t >= opts.horizon - 1e-12 {
            trace.termination = Termination::Horizon;
            break;
        }
        if p.min().1 < cfg.pinch_threshold {
            trace.termination = Termination::PinchThreshold;
            break;
        }
        let mut dt = cfg.dt.min(opts.horizon - t);
        if let Some(c) = cfg.adaptive {
            dt = dt.min(c * p.min().1.powi(2));
        }
        let stepped = if rescaled {
            let c = StepperConfig { dt, ..cfg.clone() };
            rmcf_step(&p, &c)
        } else {
            mcf_step_dt(&p, cfg, dt)
        };
        p = match stepped {
            Ok(next) => next,
            Err(Error::StepRejected { dt: bad, suggested }) => {
                trace.termination =
                    Termination::Stopped(format!("step {bad} rejected, suggested {suggested}"));
                break;
            }
            Err(e @ (Error::Pinch { .. } | Error::OutOfRegime(_))) => {
                trace.termination = Termination::Stopped(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        };
        // snap onto the horizon despite rounding in the time sum
        let now = p.time().value();
        if (now - opts.horizon).abs() < 1e-9 * opts.horizon.abs().max(1.0) {
            p = p.with_values(p.values().to_vec(), p.time().with_value(opts.horizon));
        }
        trace.minima.push((p.time().value(), p.min().1));
        if opts.sample_every <= 0.0 || p.time().value() >= next_sample - 1e-9 {
            trace.records.push(record(&p));
            if opts.keep_profiles {
                trace.profiles.push(p.clone());
            }
            while next_sample <= p.time().value() + 1e-9 {
                next_sample += opts.sample_every.max(f64::MIN_POSITIVE);
            }
        }
    }
    if trace.records.last().map(|r| r.time) != Some(p.time().value()) {
        trace.records.push(record(&p));
        if opts.keep_profiles {
            trace.profiles.push(p.clone());
        }
    }
    Ok(trace)
}

/// Outcome of [`detect_pinch`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinchStatus {
    Found,
    NoneFound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchEstimate {
    pub singular_time: f64,
    pub location: f64,
    /// Fitted `c` in `min v^2 = c (T - t)`.
    pub rate: f64,
    pub status: PinchStatus,
}

/// Extrapolate the singular time from the minimum-radius history.
///
/// Fits `min v^2 = c (T - t)` by least squares over the last decade of
/// decrease: the samples with `min v <= 10 min v_final`.
pub fn detect_pinch(trace: &FlowTrace) -> PinchEstimate {
    let none = PinchEstimate {
        singular_time: f64::NAN,
        location: f64::NAN,
        rate: f64::NAN,
        status: PinchStatus::NoneFound,
    };
    let Some(&(_, v_end)) = trace.minima.last() else {
        return none;
    };
    let v_start = trace.minima[0].1;
    if trace.rescaled || trace.minima.len() < 3 || v_end > 0.5 * v_start {
        return none;
    }
    let tail: Vec<(f64, f64)> = trace
        .minima
        .iter()
        .copied()
        .filter(|(_, v)| *v <= 10.0 * v_end)
        .collect();
    let tail = if tail.len() >= 3 {
        tail
    } else {
        trace.minima[trace.minima.len() - 3..].to_vec()
    };
    let n = tail.len() as f64;
    let mt = tail.iter().map(|x| x.0).sum::<f64>() / n;
    let mv = tail.iter().map(|x| x.1 * x.1).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|x| (x.0 - mt).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|x| (x.0 - mt) * (x.1 * x.1 - mv)).sum();
    if sxx <= 0.0 || sxy >= 0.0 {
        return none;
    }
    let slope = sxy / sxx;
    let location = trace.records.last().map(|r| r.argmin).unwrap_or(f64::NAN);
    PinchEstimate {
        singular_time: mt - mv / slope,
        location,
        rate: -slope,
        status: PinchStatus::Found,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{BoundaryMode, CoordinateKind, TimeStamp};
    use crate::CylinderParams;

    #[test]
    fn cylinder_lifespan() {
        let p = CylinderParams::new(2, 1).unwrap();
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            1.0,
            21,
            TimeStamp::Flow(0.0),
            |_| 1.0,
        )
        .unwrap();
        let cfg = StepperConfig::new(1e-3)
            .unwrap()
            .with_boundary(BoundaryMode::Neumann)
            .with_adaptive(Some(0.02))
            .with_pinch_threshold(1e-3);
        let trace = run_flow(
            &prof,
            &cfg,
            &RunOptions {
                horizon: 1.0,
                sample_every: 0.05,
                keep_profiles: false,
            },
        )
        .unwrap();
        assert_eq!(trace.termination, Termination::PinchThreshold);
        let est = detect_pinch(&trace);
        assert_eq!(est.status, PinchStatus::Found);
        assert!(
            (est.singular_time - 0.5).abs() < 1e-4,
            "{}",
            est.singular_time
        );
        assert!((est.rate - 2.0).abs() < 1e-3);
    }

    #[test]
    fn no_pinch_when_nothing_shrinks() {
        let p = CylinderParams::new(2, 1).unwrap();
        let prof = RadialProfile::from_fn(
            p,
            CoordinateKind::Axis,
            4.0,
            41,
            TimeStamp::Rescaled(0.0),
            |_| p.rho(),
        )
        .unwrap();
        let cfg = StepperConfig::new(0.1)
            .unwrap()
            .with_boundary(BoundaryMode::Neumann);
        let trace = run_flow(
            &prof,
            &cfg,
            &RunOptions {
                horizon: 2.0,
                sample_every: 0.5,
                keep_profiles: true,
            },
        )
        .unwrap();
        assert_eq!(trace.termination, Termination::Horizon);
        assert_eq!(trace.records.len(), 5);
        assert!(trace.records.windows(2).all(|w| w[0].time < w[1].time));
        assert_eq!(detect_pinch(&trace).status, PinchStatus::NoneFound);
    }
}
