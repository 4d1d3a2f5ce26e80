//! Scenario registry. Each scenario returns its tables, summary metrics and
//! pass/fail checks; [`run_scenario`] writes them out with a manifest.

mod geometry;
mod neck;
mod rescaled;
mod spectral;

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{Context, Result};

use crate::config::{RunConfig, Scenario};
use neckflow::flow::FlowTrace;

use crate::output::{write_table, CheckResult, RunManifest, Table};

pub use rescaled::perturbed_cylinder;

/// Everything a scenario produces.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
}

impl Outcome {
    pub(crate) fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    /// Metric by name, for callers that inspect results directly.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn cylinder(cfg: &RunConfig) -> Result<neckflow::CylinderParams> {
    let (n, k) = cfg.cylinder.context("scenario needs n and k")?;
    Ok(neckflow::CylinderParams::new(n, k)?)
}

/// Compute a scenario without writing anything.
pub fn run_outcome(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.scenario {
        Scenario::SpectrumValidate => spectral::spectrum_validate(cfg),
        Scenario::JacobiDecay => spectral::jacobi_decay(cfg),
        Scenario::NeckpinchMcf => neck::neckpinch_mcf(cfg),
        Scenario::CuspRestart => neck::cusp_restart(cfg),
        Scenario::NondegenerateRmcf => rescaled::nondegenerate_rmcf(cfg),
        Scenario::MonotonicitySweep => rescaled::monotonicity_sweep(cfg),
        Scenario::Nonconcentration => rescaled::nonconcentration(cfg),
        Scenario::Noncollapse => geometry::noncollapse(cfg),
        Scenario::BowlOde => geometry::bowl_ode(cfg),
        Scenario::SurgeryTable => geometry::surgery_table(cfg),
    }
}

/// Run a scenario, write its CSV files and `manifest.json` into `cfg.out`.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunManifest> {
    let start = Instant::now();
    let outcome = run_outcome(cfg).with_context(|| format!("scenario {}", cfg.scenario))?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    let files = outcome
        .tables
        .iter()
        .map(|t| write_table(t, &cfg.out))
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        config: cfg.echo(),
        version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
        metrics: outcome.metrics,
        checks: outcome.checks,
        files,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    manifest.write(&cfg.out)?;
    Ok(manifest)
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// A run trace with columns `t_or_tau,min_v,d,H_min,alpha`.
pub(crate) fn trace_table(name: &str, trace: &FlowTrace) -> Table {
    let mut t = Table::new(name, &["t_or_tau", "min_v", "d", "H_min", "alpha"]);
    for r in &trace.records {
        t.push(vec![
            r.time.into(),
            r.min_v.into(),
            r.distance.into(),
            r.h_min.into(),
            r.alpha.into(),
        ]);
    }
    t
}
