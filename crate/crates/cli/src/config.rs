//! Run configuration: defaults, optional `key=value` file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format '{other}' (expected csv or json)"),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Absolute quadrature tolerance.
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
    /// `None` lets the subcommand pick its natural format.
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            format: None,
            output: None,
        }
    }
}

/// Values given on the command line; each one overrides the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(file: Option<&Path>, flags: Overrides) -> anyhow::Result<Self> {
        let mut cfg = match file {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                Self::parse(&text)?
            }
            None => Self::default(),
        };
        cfg.tolerance = flags.tolerance.unwrap_or(cfg.tolerance);
        cfg.samples = flags.samples.unwrap_or(cfg.samples);
        cfg.seed = flags.seed.unwrap_or(cfg.seed);
        cfg.format = flags.format.or(cfg.format);
        cfg.output = flags.output.or(cfg.output);
        cfg.validate()?;
        Ok(cfg)
    }

    /// `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("config line {}: expected key=value", n + 1))?;
            let value = value.trim();
            let bad = || format!("config line {}: bad value '{value}'", n + 1);
            match key.trim() {
                "tolerance" => cfg.tolerance = value.parse().with_context(bad)?,
                "samples" => cfg.samples = value.parse().with_context(bad)?,
                "seed" => cfg.seed = value.parse().with_context(bad)?,
                "format" => cfg.format = Some(value.parse()?),
                "output" => cfg.output = Some(PathBuf::from(value)),
                other => bail!("config line {}: unknown key '{other}'", n + 1),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            bail!("tolerance must be positive, got {}", self.tolerance);
        }
        if self.samples < MIN_SAMPLES {
            bail!("samples must be at least {MIN_SAMPLES}, got {}", self.samples);
        }
        Ok(())
    }
}
