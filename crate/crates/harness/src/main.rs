//! `neckflow` command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use neckflow_harness::{run_scenario, RawConfig};

#[derive(Debug, Parser)]
#[command(
    name = "neckflow",
    version,
    about = "Run a neckflow scenario and write its CSV traces and manifest"
)]
struct Cli {
    /// Scenario name, e.g. `spectrum-validate` or `surgery-table`.
    scenario: Option<String>,
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
}

fn raw_config(cli: &Cli) -> anyhow::Result<RawConfig> {
    let mut raw = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    if let Some(s) = &cli.scenario {
        raw.set("scenario", s);
    }
    if let Some(p) = &cli.out {
        raw.set("out", p.display());
    }
    let numeric: [(&str, Option<String>); 6] = [
        ("seed", cli.seed.map(|v| v.to_string())),
        ("n", cli.n.map(|v| v.to_string())),
        ("k", cli.k.map(|v| v.to_string())),
        ("tau0", cli.tau0.map(|v| v.to_string())),
        ("grid_points", cli.grid_points.map(|v| v.to_string())),
        ("horizon", cli.horizon.map(|v| v.to_string())),
    ];
    for (key, value) in numeric {
        if let Some(v) = value {
            raw.set(key, v);
        }
    }
    Ok(raw)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match raw_config(&cli).and_then(|raw| Ok(raw.resolve()?)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_scenario(&cfg) {
        Ok(manifest) => {
            for c in &manifest.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            println!(
                "wrote {} files to {}",
                manifest.files.len() + 1,
                cfg.out.display()
            );
            if manifest.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("runtime error: {e:#}");
            ExitCode::from(3)
        }
    }
}
