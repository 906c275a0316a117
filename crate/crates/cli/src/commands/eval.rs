//! `odopal eval` — score COCO-JSON predictions against ground truth
//! in bbox and mask modes; writes the report as CSV and a text table.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;

use odopal_core::annot::BodyPart;
use odopal_core::segeval::{evaluate, ModeReport};

use crate::config::{self, FileConfig};
use crate::formats::{detect_format, image_index, load_annotations, load_predictions, InFormat};
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Ground truth: COCO .json, or a directory of YOLO .txt or
    /// label-raster .png files.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Predictions: COCO .json with per-annotation scores.
    #[arg(long)]
    pred: PathBuf,
    /// Output directory for eval.csv and eval.txt.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Ground-truth format (default: detected).
    #[arg(long, value_enum)]
    format: Option<InFormat>,
    /// Image directory supplying dimensions for YOLO ground truth.
    #[arg(long)]
    images: Option<PathBuf>,
}

fn mode_json(report: &ModeReport) -> serde_json::Value {
    let per_class = |map: &std::collections::BTreeMap<BodyPart, Option<f64>>| {
        map.iter()
            .map(|(part, ap)| (part.name().to_string(), json!(ap)))
            .collect::<serde_json::Map<_, _>>()
    };
    json!({
        "map": report.map,
        "map50": report.map50,
        "map75": report.map75,
        "ap_per_class": per_class(&report.ap_per_class),
        "ap50_per_class": per_class(&report.ap50_per_class),
    })
}

pub fn run(args: Args, file: &FileConfig) -> Result<Outcome> {
    let gt_path = config::require(args.gt, file.annotations.as_ref(), "ground truth")?;
    let output = config::require(args.output, file.output.as_ref(), "output directory")?;
    let format = match args.format {
        Some(format) => format,
        None => detect_format(&gt_path)?,
    };
    let index = match args.images.as_ref().or(file.images.as_ref()) {
        Some(dir) if format == InFormat::Yolo => Some(image_index(dir)?),
        None if format == InFormat::Yolo => {
            anyhow::bail!("YOLO ground truth needs --images for pixel dimensions")
        }
        _ => None,
    };
    let loaded = load_annotations(&gt_path, format, index.as_ref())?;
    if !loaded.failures.is_empty() {
        for (path, reason) in &loaded.failures {
            log::error!("bad ground truth {}: {reason}", path.display());
        }
        anyhow::bail!("{} ground-truth file(s) failed to parse", loaded.failures.len());
    }
    if loaded.sets.is_empty() {
        anyhow::bail!("no ground-truth annotations in {}", gt_path.display());
    }
    let predictions = load_predictions(&args.pred)?;

    let report = evaluate(&predictions, &loaded.sets)?;
    std::fs::create_dir_all(&output)
        .with_context(|| format!("creating {}", output.display()))?;
    let csv_path = output.join("eval.csv");
    std::fs::write(&csv_path, report.to_csv())
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let text_path = output.join("eval.txt");
    std::fs::write(&text_path, report.to_table())
        .with_context(|| format!("writing {}", text_path.display()))?;
    log::info!(
        "bbox mAP {:.2} / mAP50 {:.2}; mask mAP {:.2} / mAP50 {:.2} -> {}",
        report.bbox.map,
        report.bbox.map50,
        report.mask.map,
        report.mask.map50,
        output.display()
    );

    Ok(Outcome {
        ok: true,
        summary: json!({
            "command": "eval",
            "images": loaded.sets.len(),
            "bbox": mode_json(&report.bbox),
            "mask": mode_json(&report.mask),
            "outputs": [
                csv_path.display().to_string(),
                text_path.display().to_string(),
            ],
        }),
    })
}
