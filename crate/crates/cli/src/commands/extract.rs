//! `odopal extract` — the palette pipeline: pair images with
//! annotations by file stem, build per-part masks, cluster the masked
//! pixels, and write palette/statistics CSVs plus optional panels.

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;

use odopal_core::annot::BodyPart;
use odopal_core::colour::{palettes_to_csv, render_palette_panel, stats_to_csv, KMeansParams};
use odopal_core::maskops::{Raster, DEFAULT_THRESHOLD};
use odopal_core::pipeline::{extract_batch, ExtractParams};

use crate::config::{self, FileConfig};
use crate::formats::{detect_format, image_index, load_annotations, parse_in_format, InFormat};
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Image directory (png/jpg).
    #[arg(long)]
    images: Option<PathBuf>,
    /// Annotations: COCO .json, or a directory of YOLO .txt or
    /// label-raster .png files.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Annotation format (default: detected).
    #[arg(long, value_enum)]
    format: Option<InFormat>,
    /// Output directory for palettes.csv and stats.csv.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Manifest restricting processing to the listed ids.
    #[arg(long)]
    ids: Option<PathBuf>,
    /// Also render panels/<id>.png palette sheets.
    #[arg(long)]
    panels: bool,
    /// Number of palette colours.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// K-means convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Mask binarization threshold (kept pixels have value > threshold).
    #[arg(long)]
    threshold: Option<u8>,
    /// Comma-separated parts to skip, or "none" (default: wings).
    #[arg(long)]
    exclude_parts: Option<String>,
    /// Write HSV columns on the 8-bit scale (H/2, S*255, V*255).
    #[arg(long)]
    hsv_8bit: bool,
}

fn parse_parts(tokens: &[&str]) -> Result<BTreeSet<BodyPart>> {
    let mut out = BTreeSet::new();
    for token in tokens {
        let token = token.trim();
        if token.is_empty() || token.eq_ignore_ascii_case("none") {
            continue;
        }
        out.insert(BodyPart::from_name(token)?);
    }
    Ok(out)
}

fn excluded_parts(args: &Args, file: &FileConfig) -> Result<BTreeSet<BodyPart>> {
    match (&args.exclude_parts, &file.exclude_parts) {
        (Some(raw), _) => parse_parts(&raw.split(',').collect::<Vec<_>>()),
        (None, Some(list)) => parse_parts(&list.iter().map(String::as_str).collect::<Vec<_>>()),
        (None, None) => Ok(BTreeSet::from([BodyPart::Wings])),
    }
}

pub fn run(args: Args, file: &FileConfig) -> Result<Outcome> {
    let images_dir = config::require(args.images.clone(), file.images.as_ref(), "image directory")?;
    let annotations =
        config::require(args.annotations.clone(), file.annotations.as_ref(), "annotations")?;
    let output = config::require(args.output.clone(), file.output.as_ref(), "output directory")?;
    let format = match args.format {
        Some(format) => format,
        None => match &file.format {
            Some(name) => parse_in_format(name)?,
            None => detect_format(&annotations)?,
        },
    };
    let k = config::pick(args.k, file.k.as_ref(), KMeansParams::default().k);
    if k == 0 {
        anyhow::bail!("k must be at least 1");
    }
    let params = ExtractParams {
        kmeans: KMeansParams {
            k,
            seed: config::resolve_seed(args.seed, file)?,
            tol: config::pick(args.tol, file.tol.as_ref(), KMeansParams::default().tol),
            ..Default::default()
        },
        threshold: config::pick(args.threshold, file.threshold.as_ref(), DEFAULT_THRESHOLD),
        excluded_parts: excluded_parts(&args, file)?,
    };
    let hsv_8bit = args.hsv_8bit || file.hsv_8bit.unwrap_or(false);
    let panels = args.panels || file.panels.unwrap_or(false);

    let mut index = image_index(&images_dir)?;
    let loaded = load_annotations(&annotations, format, Some(&index))?;
    let mut sets = loaded.sets;
    let mut failures: Vec<(String, String)> = loaded
        .failures
        .into_iter()
        .map(|(path, reason)| (path.display().to_string(), reason))
        .collect();
    for (what, reason) in &failures {
        log::warn!("skipping {what}: {reason}");
    }

    if let Some(manifest) = &args.ids {
        let text = std::fs::read_to_string(manifest)
            .with_context(|| format!("reading id manifest {}", manifest.display()))?;
        let keep: BTreeSet<String> =
            text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect();
        index.retain(|stem, _| keep.contains(stem));
        sets.retain(|set| keep.contains(set.image_id()));
    }

    // Pair by stem: images without annotations are allowed skips,
    // annotations without an image are item failures.
    let mut skipped: Vec<String> = Vec::new();
    let mut items: Vec<(Raster, odopal_core::annot::AnnotationSet)> = Vec::new();
    for set in sets {
        let Some(path) = index.get(set.image_id()) else {
            log::warn!("no image for annotation id '{}'", set.image_id());
            failures.push((set.image_id().to_string(), "no matching image".to_string()));
            continue;
        };
        match Raster::load(path) {
            Ok(image) => items.push((image, set)),
            Err(err) => {
                log::warn!("cannot read {}: {err}", path.display());
                failures.push((path.display().to_string(), err.to_string()));
            }
        }
    }
    let annotated: BTreeSet<&str> = items.iter().map(|(_, s)| s.image_id()).collect();
    for stem in index.keys() {
        if !annotated.contains(stem.as_str()) {
            log::info!("image '{stem}' has no annotations, skipping");
            skipped.push(stem.clone());
        }
    }

    let results = extract_batch(&items, &params);

    std::fs::create_dir_all(&output)
        .with_context(|| format!("creating {}", output.display()))?;
    let panels_dir = output.join("panels");
    if panels {
        std::fs::create_dir_all(&panels_dir)
            .with_context(|| format!("creating {}", panels_dir.display()))?;
    }

    let mut palette_rows = Vec::new();
    let mut stats_rows = Vec::new();
    let mut empty_parts: Vec<(String, Vec<String>)> = Vec::new();
    let mut extracted = 0usize;
    for ((image, set), result) in items.iter().zip(results) {
        match result {
            Ok(extraction) => {
                extracted += 1;
                if !extraction.empty_parts.is_empty() {
                    let names: Vec<String> = extraction
                        .empty_parts
                        .iter()
                        .map(|p| p.name().to_string())
                        .collect();
                    log::info!(
                        "image '{}': empty mask for {}",
                        extraction.image_id,
                        names.join(", ")
                    );
                    empty_parts.push((extraction.image_id.clone(), names));
                }
                if panels && !extraction.parts.is_empty() {
                    let sections: Vec<_> = extraction
                        .parts
                        .iter()
                        .map(|p| (p.mask.clone(), p.palette.clone()))
                        .collect();
                    let panel = render_palette_panel(image, &sections)?;
                    panel.save_png(&panels_dir.join(format!("{}.png", extraction.image_id)))?;
                }
                for part in extraction.parts {
                    palette_rows.push((extraction.image_id.clone(), part.part, part.palette));
                    stats_rows.push((extraction.image_id.clone(), part.stats));
                }
            }
            Err(err) => {
                log::warn!("{err}");
                failures.push((set.image_id().to_string(), err.to_string()));
            }
        }
    }
    palette_rows.sort_by(|a, b| (a.0.as_str(), a.1).cmp(&(b.0.as_str(), b.1)));
    stats_rows.sort_by(|a, b| (a.0.as_str(), a.1.part).cmp(&(b.0.as_str(), b.1.part)));

    let palettes_path = output.join("palettes.csv");
    std::fs::write(&palettes_path, palettes_to_csv(&palette_rows))
        .with_context(|| format!("writing {}", palettes_path.display()))?;
    let stats_path = output.join("stats.csv");
    std::fs::write(&stats_path, stats_to_csv(&stats_rows, hsv_8bit))
        .with_context(|| format!("writing {}", stats_path.display()))?;
    log::info!(
        "extracted {} part(s) from {extracted} image(s) -> {}",
        palette_rows.len(),
        output.display()
    );

    // Nonzero only when everything that was attempted failed.
    let attempted = extracted + failures.len();
    let ok = extracted > 0 || attempted == 0;
    Ok(Outcome {
        ok,
        summary: json!({
            "command": "extract",
            "images": extracted,
            "parts": palette_rows.len(),
            "skipped_no_annotations": skipped,
            "empty_parts": empty_parts.iter()
                .map(|(id, names)| json!({"image": id, "parts": names}))
                .collect::<Vec<_>>(),
            "failures": failures.iter()
                .map(|(what, reason)| json!({"item": what, "reason": reason}))
                .collect::<Vec<_>>(),
            "outputs": [
                palettes_path.display().to_string(),
                stats_path.display().to_string(),
            ],
        }),
    })
}
