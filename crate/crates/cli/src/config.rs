//! Optional TOML config file shared by all subcommands. Every key
//! mirrors a command-line flag; flags win on conflict, and the seed
//! additionally falls back to the `ODOPAL_SEED` environment variable.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use odopal_core::ingest::ColumnMap;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub images: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub occurrences: Option<PathBuf>,
    pub stats: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Annotation input format: yolo, coco, or raster (default: detect).
    pub format: Option<String>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub threshold: Option<u8>,
    /// Part names skipped during extraction, e.g. ["wings"].
    pub exclude_parts: Option<Vec<String>>,
    /// Write HSV columns on the 8-bit scale (H/2, S*255, V*255).
    pub hsv_8bit: Option<bool>,
    /// Render per-image palette panels during extraction.
    pub panels: Option<bool>,
    /// Split ratios, e.g. "5:1:1".
    pub ratios: Option<String>,
    /// Correlation grouping: "sex,part", "sex", "part", or "none".
    pub group_by: Option<String>,
    /// Correlation covariates: "latitude,hour" or a subset.
    pub variables: Option<String>,
    pub filter: Option<FilterConfig>,
    /// Occurrence table column names (defaults follow GBIF exports).
    pub columns: Option<ColumnMap>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub species: Option<String>,
    pub life_stage: Option<String>,
    /// [min_lat, max_lat, min_lon, max_lon]
    pub region: Option<[f64; 4]>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Seed precedence: flag, then config file, then `ODOPAL_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> Result<u64> {
    if let Some(seed) = flag.or(file.seed) {
        return Ok(seed);
    }
    match std::env::var("ODOPAL_SEED") {
        Ok(raw) => raw
            .trim()
            .parse::<u64>()
            .with_context(|| format!("ODOPAL_SEED is not a valid seed: '{raw}'")),
        Err(_) => Ok(0),
    }
}

/// Picks the flag value, falling back to the config file, then to a
/// caller-supplied default.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<&T>, default: T) -> T {
    flag.or_else(|| file.cloned()).unwrap_or(default)
}

/// Like [`pick`] but the setting is required for this subcommand.
pub fn require<T: Clone>(flag: Option<T>, file: Option<&T>, what: &str) -> Result<T> {
    flag.or_else(|| file.cloned())
        .with_context(|| format!("missing required setting '{what}' (flag or config file)"))
}
