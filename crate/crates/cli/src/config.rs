//! Run configuration: defaults, then `TWISTLAB_SEED`, then a `key = value`
//! file, then command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use twistlab_core::local_model::Tolerances;
use twistlab_core::weyl::DEFAULT_CLOSURE_CAP;
use twistlab_core::{Error, Result};

pub const SEED_ENV: &str = "TWISTLAB_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Config(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub closure_cap: usize,
    pub orbit_cap: usize,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tolerances: Tolerances::default(),
            closure_cap: DEFAULT_CLOSURE_CAP,
            orbit_cap: 1_000_000,
            seed: 0,
            format: Format::Json,
            output: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Applies the seed environment variable if it is set.
    pub fn with_env(mut self, env: Option<&str>) -> Result<Self> {
        if let Some(v) = env {
            self.seed = parse(SEED_ENV, v.trim())?;
        }
        Ok(self)
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn with_file_contents(mut self, text: &str) -> Result<Self> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(self)
    }

    pub fn with_file(self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        self.with_file_contents(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "tol_constraint" => self.tolerances.constraint = parse(key, value)?,
            "tol_period" => self.tolerances.period = parse(key, value)?,
            "h_fd" => self.tolerances.h_fd = parse(key, value)?,
            "steps_per_period" => self.tolerances.steps_per_period = parse(key, value)?,
            "closure_cap" => self.closure_cap = parse(key, value)?,
            "orbit_cap" => self.orbit_cap = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "format" => self.format = value.parse()?,
            "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if self.closure_cap == 0 || self.orbit_cap == 0 {
            return Err(Error::Config("caps must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering() {
        let c = RunConfig::default()
            .with_env(Some("7"))
            .unwrap()
            .with_file_contents("# comment\nh_fd = 1e-4\nseed=9 # trailing\nformat = csv\n")
            .unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.tolerances.h_fd, 1e-4);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(RunConfig::default().with_env(Some("7")).unwrap().seed, 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::default().with_file_contents("nope = 1").is_err());
        assert!(RunConfig::default().with_file_contents("seed").is_err());
        assert!(RunConfig::default().with_env(Some("x")).is_err());
        let c = RunConfig::default().with_file_contents("tol_period = -1").unwrap();
        assert!(c.validate().is_err());
    }
}
