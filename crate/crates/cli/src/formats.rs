//! Annotation loading shared by convert, extract, and eval: format
//! detection, per-file parsing with failures collected rather than
//! aborting, and the image index used for stem pairing and YOLO
//! denormalization.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;

use odopal_core::annot::{
    parse_coco, parse_coco_predictions, parse_yolo_seg, raster_to_annotations, AnnotationSet,
    LabelRaster,
};
use odopal_core::maskops::Raster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InFormat {
    /// Directory of YOLO segmentation .txt files (needs images for dims).
    Yolo,
    /// Single COCO .json document.
    Coco,
    /// Directory of label-raster .png files (pixel value = class + 1).
    Raster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Yolo,
    Coco,
}

pub fn parse_in_format(name: &str) -> Result<InFormat> {
    InFormat::from_str(name, true).map_err(|_| {
        anyhow::anyhow!("unknown annotation format '{name}' (expected yolo, coco, or raster)")
    })
}

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn stem_of(path: &Path) -> Option<String> {
    path.file_stem().and_then(|s| s.to_str()).map(str::to_string)
}

fn dir_files(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && has_ext(p, ext))
        .collect();
    files.sort();
    Ok(files)
}

/// Guesses the annotation format from the path: a .json file is COCO,
/// a directory is YOLO if it holds .txt files, raster if .png.
pub fn detect_format(path: &Path) -> Result<InFormat> {
    if path.is_file() {
        if has_ext(path, "json") {
            return Ok(InFormat::Coco);
        }
        bail!(
            "cannot detect annotation format of file {} (expected .json, or a directory)",
            path.display()
        );
    }
    if path.is_dir() {
        if !dir_files(path, "txt")?.is_empty() {
            return Ok(InFormat::Yolo);
        }
        if !dir_files(path, "png")?.is_empty() {
            return Ok(InFormat::Raster);
        }
        bail!(
            "no .txt or .png annotation files in directory {}",
            path.display()
        );
    }
    bail!("annotation path {} does not exist", path.display());
}

/// Maps file stem to path for every image in `dir` (png/jpg/jpeg).
pub fn image_index(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut index = BTreeMap::new();
    for entry in
        std::fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?
    {
        let path = entry?.path();
        if !path.is_file() {
            continue;
        }
        if ["png", "jpg", "jpeg"].iter().any(|e| has_ext(&path, e)) {
            if let Some(stem) = stem_of(&path) {
                index.insert(stem, path);
            }
        }
    }
    Ok(index)
}

/// Annotation sets that loaded cleanly plus per-file failures.
pub struct LoadOutcome {
    pub sets: Vec<AnnotationSet>,
    pub failures: Vec<(PathBuf, String)>,
}

/// Loads ground-truth annotations from any supported format. YOLO
/// files take their pixel dimensions from the same-stem image in
/// `images`. Individual bad files land in `failures`; only an
/// unreadable top-level path is a hard error.
pub fn load_annotations(
    path: &Path,
    format: InFormat,
    images: Option<&BTreeMap<String, PathBuf>>,
) -> Result<LoadOutcome> {
    let mut outcome = LoadOutcome { sets: Vec::new(), failures: Vec::new() };
    match format {
        InFormat::Coco => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            match parse_coco(&text) {
                Ok(sets) => outcome.sets = sets,
                Err(err) => outcome.failures.push((path.to_path_buf(), err.to_string())),
            }
        }
        InFormat::Yolo => {
            let images = images
                .context("YOLO annotations need an image directory to supply dimensions")?;
            for file in dir_files(path, "txt")? {
                let Some(stem) = stem_of(&file) else { continue };
                let Some(image_path) = images.get(&stem) else {
                    outcome
                        .failures
                        .push((file, format!("no image named '{stem}.*' for dimensions")));
                    continue;
                };
                let loaded = std::fs::read_to_string(&file)
                    .map_err(|e| e.to_string())
                    .and_then(|text| {
                        let dims = Raster::load(image_path).map_err(|e| e.to_string())?.dims();
                        let anns = parse_yolo_seg(&text, dims).map_err(|e| e.to_string())?;
                        AnnotationSet::new(stem.clone(), dims, anns).map_err(|e| e.to_string())
                    });
                match loaded {
                    Ok(set) => outcome.sets.push(set),
                    Err(err) => outcome.failures.push((file, err)),
                }
            }
        }
        InFormat::Raster => {
            for file in dir_files(path, "png")? {
                let Some(stem) = stem_of(&file) else { continue };
                let loaded = LabelRaster::load(&file)
                    .and_then(|raster| raster_to_annotations(&raster, stem.clone()));
                match loaded {
                    Ok(set) => outcome.sets.push(set),
                    Err(err) => outcome.failures.push((file, err.to_string())),
                }
            }
        }
    }
    outcome.sets.sort_by(|a, b| a.image_id().cmp(b.image_id()));
    Ok(outcome)
}

/// Loads scored predictions; only COCO JSON carries scores.
pub fn load_predictions(path: &Path) -> Result<Vec<AnnotationSet>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut sets = parse_coco_predictions(&text)
        .with_context(|| format!("parsing predictions {}", path.display()))?;
    sets.sort_by(|a, b| a.image_id().cmp(b.image_id()));
    Ok(sets)
}
