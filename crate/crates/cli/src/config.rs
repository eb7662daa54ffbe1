//! Run configuration: built-in defaults, optional TOML config file, and
//! command-line flags, in increasing order of precedence.

use anyhow::{Context, Result};
use serde::Deserialize;
use std::path::Path;

/// Optional config file mirroring the long flag names.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub levels: Option<u32>,
    pub cost: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub rounds: Option<usize>,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
    pub stat_mode: Option<String>,
    pub eps: Option<f64>,
    pub tol: Option<f64>,
    pub max_passes: Option<usize>,
    pub folds: Option<usize>,
    pub resolution: Option<usize>,
    pub bounds: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("config: cannot read {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("config: cannot parse {}", p.display()))
            }
        }
    }
}

/// Fixed fallback values (flag > config file > these).
pub mod defaults {
    pub const K: usize = 20;
    pub const LEVELS: u32 = 3;
    pub const ROUNDS: usize = 20;
    pub const ALPHA: f64 = 0.05;
    pub const TOL: f64 = 1e-4;
    pub const MAX_PASSES: usize = 1000;
    pub const SEED: u64 = 42;
    pub const FOLDS: usize = 4;
    pub const COST: f64 = 1.0;
    pub const RESOLUTION: usize = 100;
}

/// flag > config > default.
pub fn pick<T: Copy>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// flag > config, no default.
pub fn pick_opt<T: Copy>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Parse "lo,hi,lo,hi,..." into per-axis bounds.
pub fn parse_bounds(text: &str) -> Result<Vec<(f64, f64)>> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .with_context(|| format!("bounds: cannot parse {c:?}"))
        })
        .collect::<Result<_>>()?;
    anyhow::ensure!(
        !vals.is_empty() && vals.len() % 2 == 0,
        "bounds: need an even number of values (lo,hi per axis), got {}",
        vals.len()
    );
    Ok(vals.chunks_exact(2).map(|w| (w[0], w[1])).collect())
}
