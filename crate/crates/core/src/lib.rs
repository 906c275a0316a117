//! Batch analysis of segmented insect imagery.
//!
//! The crate turns per-image body-part segmentations (YOLO polygon files,
//! COCO JSON, or label rasters) plus the matching photographs into
//! per-part colour palettes and HSV statistics, joins those statistics
//! with occurrence metadata, and runs correlation analyses over the
//! joined rows. A separate evaluation module scores predicted
//! segmentations against ground truth with COCO-protocol average
//! precision.
//!
//! Modules:
//!
//! * [`maskops`] — rasters, binary masks, polygon scan conversion,
//!   resizing, thresholding, and masked-pixel extraction.
//! * [`annot`] — body-part annotation model, format parsers/writers
//!   (YOLO segmentation, COCO JSON, label rasters), dataset splitting.
//! * [`colour`] — RGB/HSV conversion, seeded k-means, palette
//!   construction, per-part colour statistics, palette panel rendering.
//! * [`stats`] — Pearson/Spearman correlation with Student-t p-values,
//!   hour-of-day remapping, grouped correlation runs.
//! * [`ingest`] — occurrence-table parsing, filtering, and the join
//!   between colour statistics and occurrence metadata.
//! * [`segeval`] — COCO-protocol mAP/AP over bounding boxes and masks.
//! * [`pipeline`] — the per-image extraction pipeline tying the above
//!   together, with a batch driver.
//!
//! Compiled with the default `parallel` feature the batch entry points
//! fan out over rayon; without it they run sequentially with identical
//! results.

pub mod annot;
pub mod colour;
pub mod ingest;
pub mod maskops;
mod par;
pub mod pipeline;
pub mod segeval;
pub mod stats;
