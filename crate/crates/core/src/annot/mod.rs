//! Body-part annotation model and interchange formats.
//!
//! The canonical unit is [`AnnotationSet`]: one image plus its polygon
//! annotations, each labelled with a [`BodyPart`]. Parsers exist for
//! YOLO segmentation text ([`parse_yolo_seg`]), COCO JSON
//! ([`parse_coco`], [`parse_coco_predictions`]) and label rasters
//! ([`raster_to_annotations`]); writers cover YOLO and COCO. Bounding
//! boxes are always recomputed from polygons, never read from inputs.

mod coco;
mod raster;
mod split;
mod yolo;

pub use coco::{parse_coco, parse_coco_predictions, write_coco};
pub use raster::{raster_to_annotations, LabelRaster};
pub use split::{split_dataset, DatasetSplit};
pub use yolo::{parse_yolo_seg, write_yolo_seg};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maskops::MaskError;

#[derive(Debug, Error)]
pub enum AnnotError {
    #[error("polygon has {0} vertices, need at least 3")]
    TooFewVertices(usize),
    #[error("score {0} outside [0, 1]")]
    BadScore(f64),
    #[error("vertex ({x}, {y}) is not finite")]
    NonFiniteVertex { x: f64, y: f64 },
    #[error("vertex ({x}, {y}) outside image bounds {width}x{height}")]
    VertexOutOfBounds {
        x: f64,
        y: f64,
        width: u32,
        height: u32,
    },
    #[error("image dimensions must be positive, got {0}x{1}")]
    EmptyDims(u32, u32),
    #[error("unknown class id {0} (expected 0..=3)")]
    UnknownClassId(i64),
    #[error("unknown part name '{0}' (expected head, thorax, abdomen, or wings)")]
    UnknownPartName(String),

    #[error("line {line}: class token '{token}' is not a non-negative integer")]
    YoloBadClass { line: usize, token: String },
    #[error("line {line}: class id {id} outside 0..=3")]
    YoloUnknownClass { line: usize, id: i64 },
    #[error("line {line}: coordinate token '{token}' is not a number")]
    YoloBadCoordinate { line: usize, token: String },
    #[error("line {line}: odd number of coordinates ({count})")]
    YoloOddCoordinates { line: usize, count: usize },
    #[error("line {line}: {count} coordinate pairs, need at least 3")]
    YoloTooFewVertices { line: usize, count: usize },
    #[error("line {line}: normalized coordinate {value} outside [0, 1]")]
    YoloCoordinateOutOfRange { line: usize, value: f64 },

    #[error("malformed COCO JSON: {0}")]
    CocoJson(#[from] serde_json::Error),
    #[error("COCO category {id} has unknown name '{name}' (expected head, thorax, abdomen, or wings)")]
    CocoUnknownCategory { id: u64, name: String },
    #[error("COCO annotation {id} references unknown category {category_id}")]
    CocoUnknownCategoryId { id: u64, category_id: u64 },
    #[error("COCO annotation {id} references unknown image {image_id}")]
    CocoUnknownImage { id: u64, image_id: u64 },
    #[error("COCO annotation {id}: segmentation is not a list of polygons (RLE is unsupported)")]
    CocoNotPolygons { id: u64 },
    #[error("COCO annotation {id}: empty segmentation")]
    CocoEmptySegmentation { id: u64 },
    #[error("COCO annotation {id}: polygon has {len} values, need an even count of at least 6")]
    CocoBadPolygon { id: u64, len: usize },
    #[error("COCO annotation {id}: missing score (required for predictions)")]
    CocoMissingScore { id: u64 },
    #[error("COCO annotation {id}: {source}")]
    CocoInvalid {
        id: u64,
        #[source]
        source: Box<AnnotError>,
    },
    #[error("COCO image {id} has invalid dimensions {width}x{height}")]
    CocoBadImageDims { id: u64, width: u32, height: u32 },

    #[error("label value {value} at ({x}, {y}) outside 0..=4")]
    BadLabel { value: u8, x: u32, y: u32 },

    #[error("split ratios ({0}, {1}, {2}) must be finite, non-negative, and sum to a positive value")]
    BadRatios(f64, f64, f64),

    #[error(transparent)]
    Mask(#[from] MaskError),
}

/// The four annotated body parts. Class ids (YOLO) are `head = 0`,
/// `thorax = 1`, `abdomen = 2`, `wings = 3`; label-raster values and
/// COCO category ids are class id + 1, with 0 reserved for background.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum BodyPart {
    Head,
    Thorax,
    Abdomen,
    Wings,
}

impl BodyPart {
    pub const ALL: [BodyPart; 4] = [
        BodyPart::Head,
        BodyPart::Thorax,
        BodyPart::Abdomen,
        BodyPart::Wings,
    ];

    pub fn class_id(self) -> u8 {
        match self {
            BodyPart::Head => 0,
            BodyPart::Thorax => 1,
            BodyPart::Abdomen => 2,
            BodyPart::Wings => 3,
        }
    }

    pub fn from_class_id(id: i64) -> Result<Self, AnnotError> {
        match id {
            0 => Ok(BodyPart::Head),
            1 => Ok(BodyPart::Thorax),
            2 => Ok(BodyPart::Abdomen),
            3 => Ok(BodyPart::Wings),
            other => Err(AnnotError::UnknownClassId(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BodyPart::Head => "head",
            BodyPart::Thorax => "thorax",
            BodyPart::Abdomen => "abdomen",
            BodyPart::Wings => "wings",
        }
    }

    /// Case-insensitive name lookup.
    pub fn from_name(name: &str) -> Result<Self, AnnotError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "head" => Ok(BodyPart::Head),
            "thorax" => Ok(BodyPart::Thorax),
            "abdomen" => Ok(BodyPart::Abdomen),
            "wings" => Ok(BodyPart::Wings),
            _ => Err(AnnotError::UnknownPartName(name.to_string())),
        }
    }
}

impl fmt::Display for BodyPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Axis-aligned box in pixel coordinates, `(x, y)` top-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    /// Tight box around the vertices. Requires a non-empty slice.
    pub fn from_polygon(polygon: &[(f64, f64)]) -> Self {
        let mut min_x = f64::INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for &(x, y) in polygon {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        BBox {
            x: min_x,
            y: min_y,
            w: max_x - min_x,
            h: max_y - min_y,
        }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// One polygon labelled with a body part. The bounding box is derived
/// from the polygon at construction and kept consistent by keeping the
/// polygon immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct PartAnnotation {
    pub part: BodyPart,
    polygon: Vec<(f64, f64)>,
    bbox: BBox,
    score: f64,
}

impl PartAnnotation {
    pub fn new(
        part: BodyPart,
        polygon: Vec<(f64, f64)>,
        score: f64,
    ) -> Result<Self, AnnotError> {
        if polygon.len() < 3 {
            return Err(AnnotError::TooFewVertices(polygon.len()));
        }
        for &(x, y) in &polygon {
            if !x.is_finite() || !y.is_finite() {
                return Err(AnnotError::NonFiniteVertex { x, y });
            }
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(AnnotError::BadScore(score));
        }
        let bbox = BBox::from_polygon(&polygon);
        Ok(Self {
            part,
            polygon,
            bbox,
            score,
        })
    }

    pub fn polygon(&self) -> &[(f64, f64)] {
        &self.polygon
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn score(&self) -> f64 {
        self.score
    }
}

/// All annotations for one image, with the image dimensions they are
/// expressed in. Every vertex is validated to lie within
/// `[0, width] x [0, height]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    image_id: String,
    width: u32,
    height: u32,
    annotations: Vec<PartAnnotation>,
}

impl AnnotationSet {
    pub fn new(
        image_id: impl Into<String>,
        dims: (u32, u32),
        annotations: Vec<PartAnnotation>,
    ) -> Result<Self, AnnotError> {
        let (width, height) = dims;
        if width == 0 || height == 0 {
            return Err(AnnotError::EmptyDims(width, height));
        }
        for ann in &annotations {
            for &(x, y) in ann.polygon() {
                if x < 0.0 || y < 0.0 || x > width as f64 || y > height as f64 {
                    return Err(AnnotError::VertexOutOfBounds {
                        x,
                        y,
                        width,
                        height,
                    });
                }
            }
        }
        Ok(Self {
            image_id: image_id.into(),
            width,
            height,
            annotations,
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn annotations(&self) -> &[PartAnnotation] {
        &self.annotations
    }

    /// Distinct parts that have at least one annotation.
    pub fn parts_present(&self) -> BTreeSet<BodyPart> {
        self.annotations.iter().map(|a| a.part).collect()
    }
}
