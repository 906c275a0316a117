//! `odopal convert` — translate annotations between formats. Valid
//! files are converted even when siblings are broken; broken files
//! are listed and force a nonzero exit.

use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::json;

use odopal_core::annot::{write_coco, write_yolo_seg};

use crate::config::{self, FileConfig};
use crate::formats::{
    detect_format, image_index, load_annotations, parse_in_format, InFormat, OutFormat,
};
use crate::Outcome;

#[derive(clap::Args)]
pub struct Args {
    /// Annotation source: COCO .json file, or a directory of YOLO
    /// .txt / label-raster .png files.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Destination: a directory for YOLO output, a .json path (or
    /// directory) for COCO output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Target format.
    #[arg(long, value_enum)]
    to: OutFormat,
    /// Source format (default: detected from the input path).
    #[arg(long, value_enum)]
    format: Option<InFormat>,
    /// Image directory supplying dimensions for YOLO input.
    #[arg(long)]
    images: Option<PathBuf>,
}

pub fn run(args: Args, file: &FileConfig) -> Result<Outcome> {
    let input = config::require(args.input, file.annotations.as_ref(), "input annotations")?;
    let output = config::require(args.output, file.output.as_ref(), "output path")?;
    let format = match args.format {
        Some(format) => format,
        None => match &file.format {
            Some(name) => parse_in_format(name)?,
            None => detect_format(&input)?,
        },
    };
    let images = args.images.or_else(|| file.images.clone());
    let index = match (&images, format) {
        (Some(dir), InFormat::Yolo) => Some(image_index(dir)?),
        (None, InFormat::Yolo) => {
            anyhow::bail!("YOLO input needs --images for pixel dimensions")
        }
        _ => None,
    };

    let loaded = load_annotations(&input, format, index.as_ref())?;
    for (path, reason) in &loaded.failures {
        log::warn!("skipping {}: {reason}", path.display());
    }

    let written = match args.to {
        OutFormat::Coco => {
            let target = if output.extension().is_some_and(|e| e == "json") {
                if let Some(parent) = output.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
                output.clone()
            } else {
                std::fs::create_dir_all(&output)
                    .with_context(|| format!("creating {}", output.display()))?;
                output.join("annotations.json")
            };
            std::fs::write(&target, write_coco(&loaded.sets))
                .with_context(|| format!("writing {}", target.display()))?;
            log::info!(
                "wrote {} image entries to {}",
                loaded.sets.len(),
                target.display()
            );
            vec![target]
        }
        OutFormat::Yolo => {
            std::fs::create_dir_all(&output)
                .with_context(|| format!("creating {}", output.display()))?;
            let mut written = Vec::new();
            for set in &loaded.sets {
                let text = write_yolo_seg(set.annotations(), set.dims())
                    .with_context(|| format!("serializing '{}'", set.image_id()))?;
                let target = output.join(format!("{}.txt", set.image_id()));
                std::fs::write(&target, text)
                    .with_context(|| format!("writing {}", target.display()))?;
                written.push(target);
            }
            log::info!("wrote {} YOLO files to {}", written.len(), output.display());
            written
        }
    };

    let ok = loaded.failures.is_empty();
    if !ok {
        log::error!("{} input file(s) could not be converted", loaded.failures.len());
    }
    Ok(Outcome {
        ok,
        summary: json!({
            "command": "convert",
            "converted": loaded.sets.len(),
            "outputs": written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "failures": loaded.failures.iter()
                .map(|(path, reason)| json!({
                    "path": path.display().to_string(),
                    "reason": reason,
                }))
                .collect::<Vec<_>>(),
        }),
    })
}
