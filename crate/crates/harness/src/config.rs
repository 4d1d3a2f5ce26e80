//! Line-oriented `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    SpectrumValidate,
    JacobiDecay,
    NeckpinchMcf,
    NondegenerateRmcf,
    CuspRestart,
    MonotonicitySweep,
    Nonconcentration,
    Noncollapse,
    BowlOde,
    SurgeryTable,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::SpectrumValidate,
        Scenario::JacobiDecay,
        Scenario::NeckpinchMcf,
        Scenario::NondegenerateRmcf,
        Scenario::CuspRestart,
        Scenario::MonotonicitySweep,
        Scenario::Nonconcentration,
        Scenario::Noncollapse,
        Scenario::BowlOde,
        Scenario::SurgeryTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SpectrumValidate => "spectrum-validate",
            Scenario::JacobiDecay => "jacobi-decay",
            Scenario::NeckpinchMcf => "neckpinch-mcf",
            Scenario::NondegenerateRmcf => "nondegenerate-rmcf",
            Scenario::CuspRestart => "cusp-restart",
            Scenario::MonotonicitySweep => "monotonicity-sweep",
            Scenario::Nonconcentration => "nonconcentration",
            Scenario::Noncollapse => "noncollapse",
            Scenario::BowlOde => "bowl-ode",
            Scenario::SurgeryTable => "surgery-table",
        }
    }

    /// Whether the scenario is parameterised by a cylinder `(n, k)`.
    pub fn needs_cylinder(self) -> bool {
        !matches!(self, Scenario::BowlOde | Scenario::SurgeryTable)
    }

    fn defaults(self) -> Defaults {
        let d = Defaults {
            grid_points: 401,
            extent: 10.0,
            tau0: 25.0,
            horizon: 1.0,
            dt: 0.01,
            runs: 1,
        };
        match self {
            Scenario::SpectrumValidate => Defaults {
                grid_points: 2000,
                extent: 16.0,
                ..d
            },
            Scenario::JacobiDecay => Defaults {
                grid_points: 321,
                extent: 8.0,
                horizon: 6.0,
                runs: 1000,
                ..d
            },
            Scenario::NeckpinchMcf => Defaults {
                grid_points: 3001,
                extent: 1.5,
                tau0: 3.0,
                horizon: 0.0,
                dt: 1e-3,
                ..d
            },
            Scenario::NondegenerateRmcf | Scenario::Nonconcentration => Defaults {
                grid_points: 301,
                extent: 15.0,
                horizon: 200.0,
                ..d
            },
            Scenario::CuspRestart => Defaults {
                grid_points: 401,
                horizon: 0.05,
                dt: 1e-5,
                ..d
            },
            Scenario::MonotonicitySweep => Defaults {
                grid_points: 321,
                extent: 8.0,
                horizon: 8.0,
                runs: 20,
                ..d
            },
            Scenario::Noncollapse => Defaults {
                grid_points: 400,
                extent: 10.0,
                horizon: 0.5,
                dt: 1e-3,
                ..d
            },
            Scenario::BowlOde => Defaults {
                grid_points: 13001,
                extent: 130.0,
                ..d
            },
            Scenario::SurgeryTable => d,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.name() == s || sc.name().split('-').next() == Some(s))
            .ok_or_else(|| invalid("scenario", format!("unknown scenario `{s}`")))
    }
}

struct Defaults {
    grid_points: usize,
    extent: f64,
    tau0: f64,
    horizon: f64,
    dt: f64,
    runs: usize,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// `(n, k)`; `None` for scenarios that do not take a cylinder.
    pub cylinder: Option<(usize, usize)>,
    pub grid_points: usize,
    /// Half-length or radius of the computational domain.
    pub extent: f64,
    pub tau0: f64,
    /// Final time; `0` lets the run stop at its own criterion.
    pub horizon: f64,
    pub dt: f64,
    /// Number of randomised runs.
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
}

const KEYS: [&str; 11] = [
    "scenario",
    "n",
    "k",
    "grid_points",
    "extent",
    "tau0",
    "horizon",
    "dt",
    "runs",
    "seed",
    "out",
];

/// Raw `key = value` pairs, later overridable from the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    message: format!("unknown key `{key}`"),
                });
            }
            if values
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::Parse {
                    line: i + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| invalid(key, format!("cannot parse `{v}`")))
            })
            .transpose()
    }

    /// Fill defaults and validate.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let scenario: Scenario = self
            .get("scenario")?
            .ok_or_else(|| invalid("scenario", "missing"))?;
        let d = scenario.defaults();
        let cylinder = if scenario.needs_cylinder() {
            let n: usize = self.get("n")?.ok_or_else(|| invalid("n", "missing"))?;
            let k: usize = self.get("k")?.ok_or_else(|| invalid("k", "missing"))?;
            if n < 2 {
                return Err(invalid("n", format!("n = {n} must be at least 2")));
            }
            if k < 1 || k >= n {
                return Err(invalid("k", format!("k = {k} out of range 1..={}", n - 1)));
            }
            Some((n, k))
        } else {
            None
        };
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(invalid(key, format!("{v} must be positive")))
            }
        };
        let grid_points = self.get("grid_points")?.unwrap_or(d.grid_points);
        if grid_points < 16 {
            return Err(invalid(
                "grid_points",
                format!("{grid_points} is below the minimum of 16"),
            ));
        }
        let runs = self.get("runs")?.unwrap_or(d.runs);
        if runs == 0 {
            return Err(invalid("runs", "must be positive"));
        }
        let horizon = self.get("horizon")?.unwrap_or(d.horizon);
        if !(horizon >= 0.0) {
            return Err(invalid(
                "horizon",
                format!("{horizon} must be non-negative"),
            ));
        }
        Ok(RunConfig {
            scenario,
            cylinder,
            grid_points,
            extent: positive("extent", self.get("extent")?.unwrap_or(d.extent))?,
            tau0: positive("tau0", self.get("tau0")?.unwrap_or(d.tau0))?,
            horizon,
            dt: positive("dt", self.get("dt")?.unwrap_or(d.dt))?,
            runs,
            seed: self.get("seed")?.unwrap_or(0),
            out: self.get("out")?.unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

/// Read and validate a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    RawConfig::parse(&text)?.resolve()
}

impl RunConfig {
    /// Defaults for `scenario` with the given cylinder.
    pub fn for_scenario(
        scenario: Scenario,
        cylinder: Option<(usize, usize)>,
    ) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        raw.set("scenario", scenario.name());
        if let Some((n, k)) = cylinder {
            raw.set("n", n);
            raw.set("k", k);
        }
        raw.resolve()
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("scenario".into(), self.scenario.name().into());
        if let Some((n, k)) = self.cylinder {
            m.insert("n".into(), n.to_string());
            m.insert("k".into(), k.to_string());
        }
        m.insert("grid_points".into(), self.grid_points.to_string());
        m.insert("extent".into(), self.extent.to_string());
        m.insert("tau0".into(), self.tau0.to_string());
        m.insert("horizon".into(), self.horizon.to_string());
        m.insert("dt".into(), self.dt.to_string());
        m.insert("runs".into(), self.runs.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("out".into(), self.out.display().to_string());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_examples() {
        let cfg = RawConfig::parse("scenario = spectrum\nn = 2\nk = 1")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(cfg.scenario, Scenario::SpectrumValidate);
        assert_eq!(cfg.cylinder, Some((2, 1)));
        assert_eq!(cfg.grid_points, 2000);
        let cfg = RawConfig::parse("# table\nscenario = surgery-table  # no cylinder\n")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(cfg.cylinder, None);
    }

    #[test]
    fn reports_fields_and_lines() {
        let err = RawConfig::parse("scenario = spectrum\nk = 1")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "n"));
        let err = RawConfig::parse("scenario = spectrum\nn = 3\nk = 5")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "k"));
        let err = RawConfig::parse("scenario = spectrum\n\nwidth = 3").unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 3,
                message: "unknown key `width`".into()
            }
        );
        assert!(matches!(
            RawConfig::parse("n 2"),
            Err(ConfigError::Parse { line: 1, .. })
        ));
        let err = RawConfig::parse("scenario = spectrum\nn = 2\nk = 1\ndt = -1")
            .unwrap()
            .resolve()
            .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid { ref field, .. } if field == "dt"));
    }

    #[test]
    fn every_scenario_has_a_name() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
    }
}
