//! `key = value` configuration files for `simulate`. Command-line flags take
//! precedence over file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use decay_core::generation::DEFAULT_MAX_REJECTS;
use decay_core::grid::DEFAULT_GRID_POINTS;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "n",
    "p",
    "trials",
    "seed",
    "max_rejects",
    "grid_points",
    "workers",
    "out_dir",
];

/// Raw values from a config file, keyed by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
}

impl ConfigFile {
    /// One `key = value` per line; `#` starts a comment.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected `key = value`, found `{line}`",
                    i + 1
                )));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}` (known: {})",
                    i + 1,
                    KEYS.join(", ")
                )));
            }
            if values.insert(key.to_string(), (i + 1, value.trim().to_string())).is_some() {
                return Err(CliError::Usage(format!(
                    "config line {}: `{key}` given twice",
                    i + 1
                )));
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        let Some((line, raw)) = self.values.get(key) else {
            return Ok(None);
        };
        raw.parse().map(Some).map_err(|_| {
            CliError::Usage(format!("config line {line}: invalid value `{raw}` for `{key}`"))
        })
    }
}

/// Flag values for `simulate`, before merging with a config file.
#[derive(Clone, Debug, Default)]
pub struct SimulateOverrides {
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub max_rejects: Option<u64>,
    pub grid_points: Option<usize>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

/// Fully resolved and validated `simulate` configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateConfig {
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub max_rejects: u64,
    pub grid_points: usize,
    pub workers: usize,
    pub out_dir: PathBuf,
}

fn pick<T: FromStr>(flag: Option<T>, file: &ConfigFile, key: &str) -> CliResult<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

fn required<T>(v: Option<T>, key: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing required setting `{key}` (flag --{})", key.replace('_', "-"))))
}

impl SimulateConfig {
    pub fn resolve(flags: SimulateOverrides, file: &ConfigFile) -> CliResult<Self> {
        let n = required(pick(flags.n, file, "n")?, "n")?;
        let p = required(pick(flags.p, file, "p")?, "p")?;
        let trials = required(pick(flags.trials, file, "trials")?, "trials")?;
        let seed = required(pick(flags.seed, file, "seed")?, "seed")?;
        let max_rejects = pick(flags.max_rejects, file, "max_rejects")?.unwrap_or(DEFAULT_MAX_REJECTS);
        let grid_points = pick(flags.grid_points, file, "grid_points")?.unwrap_or(DEFAULT_GRID_POINTS);
        let workers = pick(flags.workers, file, "workers")?.unwrap_or(1);
        let out_dir = required(pick(flags.out_dir, file, "out_dir")?, "out_dir")?;

        if n < 2 {
            return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(CliError::Usage(format!("p must lie in (0, 1], got {p}")));
        }
        if grid_points == 0 {
            return Err(CliError::Usage("grid_points must be at least 1".into()));
        }
        if workers == 0 {
            return Err(CliError::Usage("workers must be at least 1".into()));
        }
        Ok(SimulateConfig {
            n,
            p,
            trials,
            seed,
            max_rejects,
            grid_points,
            workers,
            out_dir,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> SimulateOverrides {
        SimulateOverrides {
            out_dir: Some("out".into()),
            ..Default::default()
        }
    }

    #[test]
    fn file_values_and_flag_overrides() {
        let file = ConfigFile::parse("# sweep\nn = 10\np=0.05\ntrials = 100 # small\nseed = 7\n").unwrap();
        let c = SimulateConfig::resolve(flags(), &file).unwrap();
        assert_eq!((c.n, c.p, c.trials, c.seed), (10, 0.05, 100, 7));
        assert_eq!((c.max_rejects, c.grid_points, c.workers), (DEFAULT_MAX_REJECTS, 99, 1));
        let c = SimulateConfig::resolve(
            SimulateOverrides {
                n: Some(20),
                seed: Some(1),
                ..flags()
            },
            &file,
        )
        .unwrap();
        assert_eq!((c.n, c.seed, c.trials), (20, 1, 100));
    }

    #[test]
    fn seed_is_required() {
        let file = ConfigFile::parse("n = 10\np = 0.5\ntrials = 3\n").unwrap();
        let e = SimulateConfig::resolve(flags(), &file).unwrap_err();
        assert!(e.to_string().contains("seed"));
        assert!(matches!(e, CliError::Usage(_)));
    }

    #[test]
    fn bad_files() {
        assert!(ConfigFile::parse("n 10").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("n = 1\nn = 2").is_err());
        let file = ConfigFile::parse("n = ten").unwrap();
        let e = file.get::<usize>("n").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn invalid_values() {
        let file = ConfigFile::parse("n = 10\np = 1.5\ntrials = 3\nseed = 1").unwrap();
        assert!(SimulateConfig::resolve(flags(), &file).is_err());
    }
}
