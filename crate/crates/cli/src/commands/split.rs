//! `odopal split` — deterministic train/val/test manifests by
//! largest-remainder apportionment of the requested ratios.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;

use odopal_core::annot::split_dataset;

use crate::config::{self, FileConfig};
use crate::formats::image_index;
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Text file with one id per line.
    #[arg(long, conflicts_with = "images")]
    ids_file: Option<PathBuf>,
    /// Image directory; file stems become the ids.
    #[arg(long)]
    images: Option<PathBuf>,
    /// train:val:test ratio, e.g. "5:1:1" or "0.7:0.2:0.1".
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving train.txt, val.txt, and test.txt.
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn parse_ratios(raw: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = raw.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        anyhow::bail!("ratios must be three colon-separated numbers, got '{raw}'");
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse::<f64>()
            .with_context(|| format!("bad ratio component '{part}' in '{raw}'"))?;
    }
    Ok((values[0], values[1], values[2]))
}

fn read_ids(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading ids from {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn write_manifest(dir: &Path, name: &str, ids: &[String]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = ids.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn run(args: Args, file: &FileConfig) -> Result<Outcome> {
    let ids = match (&args.ids_file, args.images.as_ref().or(file.images.as_ref())) {
        (Some(path), _) => read_ids(path)?,
        (None, Some(dir)) => image_index(dir)?.into_keys().collect(),
        (None, None) => anyhow::bail!("need --ids-file or --images to split"),
    };
    let ratios_raw = config::pick(args.ratios, file.ratios.as_ref(), "5:1:1".to_string());
    let ratios = parse_ratios(&ratios_raw)?;
    let seed = config::resolve_seed(args.seed, file)?;
    let output = config::require(args.output, file.output.as_ref(), "output directory")?;

    let split = split_dataset(&ids, ratios, seed)?;
    std::fs::create_dir_all(&output)
        .with_context(|| format!("creating {}", output.display()))?;
    write_manifest(&output, "train.txt", &split.train)?;
    write_manifest(&output, "val.txt", &split.val)?;
    write_manifest(&output, "test.txt", &split.test)?;
    log::info!(
        "split {} ids at {ratios_raw} (seed {seed}): {} train, {} val, {} test -> {}",
        ids.len(),
        split.train.len(),
        split.val.len(),
        split.test.len(),
        output.display()
    );
    Ok(Outcome {
        ok: true,
        summary: json!({
            "command": "split",
            "total": ids.len(),
            "seed": seed,
            "ratios": ratios_raw,
            "train": split.train.len(),
            "val": split.val.len(),
            "test": split.test.len(),
            "output": output.display().to_string(),
        }),
    })
}
