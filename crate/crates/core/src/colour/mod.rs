//! Colour analysis: RGB/HSV conversion, seeded k-means clustering,
//! dominant-colour palettes, per-part mean colour statistics, and the
//! visual palette panel.

mod hsv;
mod kmeans;
mod palette;
mod panel;

pub use hsv::{hsv_to_rgb, rgb_to_hsv, HsvTriple};
pub use kmeans::{kmeans, KMeansParams, KMeansResult};
pub use palette::{
    build_palette, mean_part_colour, palettes_to_csv, read_stats_csv, stats_to_csv,
    Palette, PaletteEntry, PartColourStats, PALETTE_CSV_HEADER, STATS_CSV_HEADER,
};
pub use panel::render_palette_panel;

use thiserror::Error;

use crate::maskops::MaskError;

#[derive(Debug, Error)]
pub enum ColourError {
    #[error("k must be positive")]
    ZeroK,
    #[error("restarts must be positive")]
    ZeroRestarts,
    #[error("max_iter must be positive")]
    ZeroMaxIter,
    #[error("tolerance {0} must be finite and non-negative")]
    BadTolerance(f64),
    #[error("cannot run k-means on an empty point list")]
    EmptyPoints,
    #[error("cannot compute colour statistics for an empty pixel list (empty mask upstream?)")]
    EmptyPixels,
    #[error("palette frequency {0} outside (0, 1]")]
    BadFrequency(f64),
    #[error("palette frequencies sum to {0}, expected 1")]
    BadFrequencySum(f64),
    #[error("stats CSV has no header row")]
    StatsCsvMissingHeader,
    #[error("stats CSV header mismatch: expected '{expected}', got '{got}'")]
    StatsCsvHeader { expected: String, got: String },
    #[error("stats CSV record {record}: {message}")]
    StatsCsvRecord { record: u64, message: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Mask(#[from] MaskError),
}
