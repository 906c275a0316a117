//! COCO JSON interchange: a single document with `images`,
//! `annotations`, and `categories` arrays. Category names must be
//! exactly the four body-part names (matched case-insensitively).
//! Multi-polygon segmentations become one [`PartAnnotation`] per
//! polygon; RLE segmentations are rejected.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AnnotError, AnnotationSet, BodyPart, PartAnnotation};

#[derive(Debug, Serialize, Deserialize)]
struct CocoDocument {
    #[serde(default)]
    images: Vec<CocoImage>,
    #[serde(default)]
    annotations: Vec<CocoAnnotation>,
    #[serde(default)]
    categories: Vec<CocoCategory>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoImage {
    id: u64,
    #[serde(default)]
    file_name: String,
    width: u32,
    height: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoAnnotation {
    #[serde(default)]
    id: u64,
    image_id: u64,
    category_id: u64,
    segmentation: Segmentation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bbox: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    area: Option<f64>,
    #[serde(default)]
    iscrowd: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Segmentation {
    Polygons(Vec<Vec<f64>>),
    Other(serde_json::Value),
}

#[derive(Debug, Serialize, Deserialize)]
struct CocoCategory {
    id: u64,
    name: String,
}

fn image_key(image: &CocoImage) -> String {
    if image.file_name.is_empty() {
        return image.id.to_string();
    }
    Path::new(&image.file_name)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| image.id.to_string())
}

fn parse_document(
    text: &str,
    require_score: bool,
) -> Result<Vec<AnnotationSet>, AnnotError> {
    let doc: CocoDocument = serde_json::from_str(text)?;

    let mut categories: HashMap<u64, BodyPart> = HashMap::new();
    for cat in &doc.categories {
        let part = BodyPart::from_name(&cat.name).map_err(|_| {
            AnnotError::CocoUnknownCategory {
                id: cat.id,
                name: cat.name.clone(),
            }
        })?;
        categories.insert(cat.id, part);
    }

    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut sets: Vec<(String, (u32, u32), Vec<PartAnnotation>)> = Vec::new();
    for image in &doc.images {
        if image.width == 0 || image.height == 0 {
            return Err(AnnotError::CocoBadImageDims {
                id: image.id,
                width: image.width,
                height: image.height,
            });
        }
        index.insert(image.id, sets.len());
        sets.push((image_key(image), (image.width, image.height), Vec::new()));
    }

    for ann in &doc.annotations {
        let part = *categories.get(&ann.category_id).ok_or(
            AnnotError::CocoUnknownCategoryId {
                id: ann.id,
                category_id: ann.category_id,
            },
        )?;
        let slot = *index
            .get(&ann.image_id)
            .ok_or(AnnotError::CocoUnknownImage {
                id: ann.id,
                image_id: ann.image_id,
            })?;
        let polygons = match &ann.segmentation {
            Segmentation::Polygons(p) => p,
            Segmentation::Other(_) => {
                return Err(AnnotError::CocoNotPolygons { id: ann.id })
            }
        };
        if polygons.is_empty() {
            return Err(AnnotError::CocoEmptySegmentation { id: ann.id });
        }
        let score = match (ann.score, require_score) {
            (Some(s), _) => s,
            (None, false) => 1.0,
            (None, true) => return Err(AnnotError::CocoMissingScore { id: ann.id }),
        };
        for flat in polygons {
            if flat.len() < 6 || flat.len() % 2 != 0 {
                return Err(AnnotError::CocoBadPolygon {
                    id: ann.id,
                    len: flat.len(),
                });
            }
            let polygon: Vec<(f64, f64)> =
                flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
            let (width, height) = sets[slot].1;
            for &(x, y) in &polygon {
                if !x.is_finite() || !y.is_finite() {
                    return Err(AnnotError::CocoInvalid {
                        id: ann.id,
                        source: Box::new(AnnotError::NonFiniteVertex { x, y }),
                    });
                }
                if x < 0.0 || y < 0.0 || x > width as f64 || y > height as f64 {
                    return Err(AnnotError::CocoInvalid {
                        id: ann.id,
                        source: Box::new(AnnotError::VertexOutOfBounds {
                            x,
                            y,
                            width,
                            height,
                        }),
                    });
                }
            }
            let part_ann =
                PartAnnotation::new(part, polygon, score).map_err(|source| {
                    AnnotError::CocoInvalid {
                        id: ann.id,
                        source: Box::new(source),
                    }
                })?;
            sets[slot].2.push(part_ann);
        }
    }

    sets.into_iter()
        .map(|(image_id, dims, annotations)| {
            AnnotationSet::new(image_id, dims, annotations)
        })
        .collect()
}

/// Parses ground-truth COCO JSON. Missing scores default to 1.0.
/// Images appear in file order; every annotation must reference a
/// declared image and category.
pub fn parse_coco(text: &str) -> Result<Vec<AnnotationSet>, AnnotError> {
    parse_document(text, false)
}

/// Parses prediction COCO JSON: identical to [`parse_coco`] except
/// that every annotation must carry a `score`.
pub fn parse_coco_predictions(text: &str) -> Result<Vec<AnnotationSet>, AnnotError> {
    parse_document(text, true)
}

fn shoelace_area(polygon: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for i in 0..polygon.len() {
        let (x1, y1) = polygon[i];
        let (x2, y2) = polygon[(i + 1) % polygon.len()];
        acc += x1 * y2 - x2 * y1;
    }
    (acc / 2.0).abs()
}

/// Serializes annotation sets as one COCO document. Image ids are
/// assigned sequentially from 1 in input order with file names
/// `<image_id>.jpg`; category ids are class id + 1.
pub fn write_coco(sets: &[AnnotationSet]) -> String {
    let mut doc = CocoDocument {
        images: Vec::new(),
        annotations: Vec::new(),
        categories: BodyPart::ALL
            .iter()
            .map(|p| CocoCategory {
                id: p.class_id() as u64 + 1,
                name: p.name().to_string(),
            })
            .collect(),
    };
    let mut next_ann_id = 1u64;
    for (i, set) in sets.iter().enumerate() {
        let image_id = i as u64 + 1;
        let (width, height) = set.dims();
        doc.images.push(CocoImage {
            id: image_id,
            file_name: format!("{}.jpg", set.image_id()),
            width,
            height,
        });
        for ann in set.annotations() {
            let flat: Vec<f64> = ann
                .polygon()
                .iter()
                .flat_map(|&(x, y)| [x, y])
                .collect();
            let bbox = ann.bbox();
            doc.annotations.push(CocoAnnotation {
                id: next_ann_id,
                image_id,
                category_id: ann.part.class_id() as u64 + 1,
                segmentation: Segmentation::Polygons(vec![flat]),
                bbox: Some([bbox.x, bbox.y, bbox.w, bbox.h]),
                area: Some(shoelace_area(ann.polygon())),
                iscrowd: 0,
                score: Some(ann.score()),
            });
            next_ann_id += 1;
        }
    }
    serde_json::to_string_pretty(&doc).expect("COCO document is serializable")
}
