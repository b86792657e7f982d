//! Run configuration: defaults, then the TOML config file, then the input
//! file header, then command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use isoskel::building::DEFAULT_DENOMINATOR_CAP;
use isoskel::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 40;
pub const DEFAULT_RADIUS: u32 = 1;

/// Optional settings as they appear in a config file or on the command line.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    pub prime: Option<u64>,
    pub degree: Option<usize>,
    pub precision: Option<u32>,
    pub seed: Option<u64>,
    pub denominator_cap: Option<i64>,
    pub samples: Option<usize>,
    pub radius: Option<u32>,
    pub suite: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Settings {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            prime: over.prime.or(self.prime),
            degree: over.degree.or(self.degree),
            precision: over.precision.or(self.precision),
            seed: over.seed.or(self.seed),
            denominator_cap: over.denominator_cap.or(self.denominator_cap),
            samples: over.samples.or(self.samples),
            radius: over.radius.or(self.radius),
            suite: over.suite.or(self.suite),
            input: over.input.or(self.input),
            output: over.output.or(self.output),
        }
    }
}

/// Validated configuration, serialized into every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub prime: u64,
    /// Degree of the unramified context; `None` picks the lcm of the slope
    /// denominators.
    pub degree: Option<usize>,
    pub precision: u32,
    pub seed: u64,
    pub denominator_cap: i64,
    pub samples: Option<usize>,
    pub radius: u32,
    pub suite: Option<String>,
    pub input: Option<String>,
    pub output: Option<String>,
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let prime = s.prime.ok_or_else(|| Error::InvalidParams("a prime is required (--prime or input)".into()))?;
        let cfg = RunConfig {
            prime,
            degree: s.degree,
            precision: s.precision.unwrap_or(DEFAULT_PRECISION),
            seed: s.seed.unwrap_or(0),
            denominator_cap: s.denominator_cap.unwrap_or(DEFAULT_DENOMINATOR_CAP),
            samples: s.samples,
            radius: s.radius.unwrap_or(DEFAULT_RADIUS),
            suite: s.suite.clone(),
            input: s.input.as_ref().map(|p| p.display().to_string()),
            output: s.output.as_ref().map(|p| p.display().to_string()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.degree == Some(0) {
            return Err(Error::InvalidParams("degree must be at least 1".into()));
        }
        if self.denominator_cap < 1 {
            return Err(Error::InvalidParams("denominator cap must be at least 1".into()));
        }
        if self.radius > 2 {
            return Err(Error::InvalidParams("radius is limited to 2".into()));
        }
        Ok(())
    }
}
